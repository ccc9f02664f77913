#pragma once

#include "starsec/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace starsec::rl {

enum class Activation { Identity, Relu, Tanh };

struct Layer {
    MatrixXd weight; // out x in
    VectorXd bias;
    Activation activation = Activation::Identity;
};

// Per-layer gradients, shaped like the network.
struct Gradients {
    std::vector<MatrixXd> weight;
    std::vector<VectorXd> bias;

    void set_zero();
    Gradients& operator+=(const Gradients& other);
};

// Intermediates of one batched forward pass (columns are samples).
struct ForwardCache {
    std::vector<MatrixXd> inputs;      // input to layer i
    std::vector<MatrixXd> activations; // output of layer i
    bool valid() const { return !inputs.empty(); }
};

class Mlp {
public:
    Mlp() = default;
    // sizes = {in, h1, ..., out}; hidden layers use ReLU.
    Mlp(const std::vector<int>& sizes, Activation output, Rng& rng);

    int input_size() const;
    int output_size() const;
    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer>& layers() { return layers_; }
    std::size_t parameter_count() const;

    MatrixXd forward(const MatrixXd& x, ForwardCache* cache = nullptr) const;
    VectorXd forward(const VectorXd& x) const;

    // Accumulates dL/dparams into grads (shaped by zero_gradients()) and returns dL/dx.
    MatrixXd backward(const ForwardCache& cache, const MatrixXd& grad_out, Gradients& grads) const;
    // Parameter gradients only; skips the input gradient of the first layer.
    void accumulate_gradients(const ForwardCache& cache, const MatrixXd& grad_out, Gradients& grads) const;
    // dL/dx only; parameters untouched.
    MatrixXd input_gradient(const ForwardCache& cache, const MatrixXd& grad_out) const;
    Gradients zero_gradients() const;

    bool operator==(const Mlp& other) const;

    void save(std::ostream& os) const;
    static Mlp load(std::istream& is);
    void save_file(const std::string& path) const;
    static Mlp load_file(const std::string& path);

private:
    MatrixXd backward_impl(const ForwardCache& cache, const MatrixXd& grad_out, Gradients* grads,
                           bool want_input) const;

    std::vector<Layer> layers_;
};

// target <- rate * online + (1 - rate) * target
void soft_update(Mlp& target, const Mlp& online, double rate);

// Squared L2 distance between two networks' parameters.
double parameter_distance(const Mlp& a, const Mlp& b);

} // namespace starsec::rl
