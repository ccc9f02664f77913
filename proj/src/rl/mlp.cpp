#include "starsec/rl/mlp.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace starsec::rl {

namespace {

constexpr std::array<char, 8> kMagic{'S', 'T', 'S', 'N', 'E', 'T', '\0', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

MatrixXd activate(const MatrixXd& z, Activation a)
{
    switch (a) {
    case Activation::Identity:
        return z;
    case Activation::Relu:
        return z.cwiseMax(0.0);
    case Activation::Tanh:
        return z.array().tanh().matrix();
    }
    throw std::logic_error("unknown activation");
}

// dL/dz given dL/dy and y = act(z)
MatrixXd activation_backward(const MatrixXd& y, const MatrixXd& grad, Activation a)
{
    switch (a) {
    case Activation::Identity:
        return grad;
    case Activation::Relu:
        return (y.array() > 0.0).select(grad, 0.0);
    case Activation::Tanh:
        return grad.cwiseProduct((1.0 - y.array().square()).matrix());
    }
    throw std::logic_error("unknown activation");
}

template <typename T>
void write_pod(std::ostream& os, const T& v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is)
{
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) {
        throw std::runtime_error("truncated checkpoint");
    }
    return v;
}

} // namespace

void Gradients::set_zero()
{
    for (auto& w : weight) w.setZero();
    for (auto& b : bias) b.setZero();
}

Gradients& Gradients::operator+=(const Gradients& other)
{
    for (std::size_t i = 0; i < weight.size(); ++i) {
        weight[i] += other.weight[i];
        bias[i] += other.bias[i];
    }
    return *this;
}

Mlp::Mlp(const std::vector<int>& sizes, Activation output, Rng& rng)
{
    if (sizes.size() < 2) {
        throw std::invalid_argument("an MLP needs at least input and output sizes");
    }
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        const int in = sizes[i];
        const int out = sizes[i + 1];
        if (in < 1 || out < 1) {
            throw std::invalid_argument("layer sizes must be positive");
        }
        // fan-in scaled uniform
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        std::uniform_real_distribution<double> u(-bound, bound);
        Layer layer;
        layer.weight = MatrixXd::NullaryExpr(out, in, [&]() { return u(rng); });
        layer.bias = VectorXd::NullaryExpr(out, [&]() { return u(rng); });
        layer.activation = (i + 2 == sizes.size()) ? output : Activation::Relu;
        layers_.push_back(std::move(layer));
    }
}

int Mlp::input_size() const
{
    return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols());
}

int Mlp::output_size() const
{
    return layers_.empty() ? 0 : static_cast<int>(layers_.back().weight.rows());
}

std::size_t Mlp::parameter_count() const
{
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
    return n;
}

MatrixXd Mlp::forward(const MatrixXd& x, ForwardCache* cache) const
{
    if (x.rows() != input_size()) {
        throw std::invalid_argument("MLP input has wrong size");
    }
    if (cache) {
        cache->inputs.clear();
        cache->activations.clear();
    }
    MatrixXd h = x;
    for (const auto& layer : layers_) {
        MatrixXd z = layer.weight * h;
        z.colwise() += layer.bias;
        MatrixXd y = activate(z, layer.activation);
        if (cache) {
            cache->inputs.push_back(std::move(h));
            cache->activations.push_back(y);
        }
        h = std::move(y);
    }
    return h;
}

VectorXd Mlp::forward(const VectorXd& x) const
{
    return forward(MatrixXd(x)).col(0);
}

Gradients Mlp::zero_gradients() const
{
    Gradients g;
    for (const auto& l : layers_) {
        g.weight.push_back(MatrixXd::Zero(l.weight.rows(), l.weight.cols()));
        g.bias.push_back(VectorXd::Zero(l.bias.size()));
    }
    return g;
}

MatrixXd Mlp::backward(const ForwardCache& cache, const MatrixXd& grad_out, Gradients& grads) const
{
    return backward_impl(cache, grad_out, &grads, true);
}

void Mlp::accumulate_gradients(const ForwardCache& cache, const MatrixXd& grad_out, Gradients& grads) const
{
    backward_impl(cache, grad_out, &grads, false);
}

MatrixXd Mlp::input_gradient(const ForwardCache& cache, const MatrixXd& grad_out) const
{
    return backward_impl(cache, grad_out, nullptr, true);
}

MatrixXd Mlp::backward_impl(const ForwardCache& cache, const MatrixXd& grad_out, Gradients* grads,
                            bool want_input) const
{
    if (!cache.valid() || cache.inputs.size() != layers_.size()) {
        throw std::logic_error("backward called without a matching forward cache");
    }
    if (grads && grads->weight.size() != layers_.size()) {
        *grads = zero_gradients();
    }
    MatrixXd g = grad_out;
    for (std::size_t i = layers_.size(); i-- > 0;) {
        const Layer& layer = layers_[i];
        const MatrixXd dz = activation_backward(cache.activations[i], g, layer.activation);
        if (grads) {
            grads->weight[i].noalias() += dz * cache.inputs[i].transpose();
            grads->bias[i] += dz.rowwise().sum();
        }
        if (i > 0 || want_input) {
            g.noalias() = layer.weight.transpose() * dz;
        }
    }
    return want_input ? g : MatrixXd();
}

bool Mlp::operator==(const Mlp& other) const
{
    if (layers_.size() != other.layers_.size()) return false;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        const auto& a = layers_[i];
        const auto& b = other.layers_[i];
        if (a.activation != b.activation || a.weight.rows() != b.weight.rows() || a.weight.cols() != b.weight.cols()) {
            return false;
        }
        if (a.weight != b.weight || a.bias != b.bias) return false;
    }
    return true;
}

void Mlp::save(std::ostream& os) const
{
    os.write(kMagic.data(), kMagic.size());
    write_pod(os, kFormatVersion);
    write_pod(os, static_cast<std::uint32_t>(layers_.size()));
    for (const auto& l : layers_) {
        write_pod(os, static_cast<std::uint32_t>(l.weight.rows()));
        write_pod(os, static_cast<std::uint32_t>(l.weight.cols()));
        write_pod(os, static_cast<std::uint32_t>(l.activation));
        os.write(reinterpret_cast<const char*>(l.weight.data()), sizeof(double) * l.weight.size());
        os.write(reinterpret_cast<const char*>(l.bias.data()), sizeof(double) * l.bias.size());
    }
    if (!os) {
        throw std::runtime_error("failed to write checkpoint");
    }
}

Mlp Mlp::load(std::istream& is)
{
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) {
        throw std::runtime_error("not a network checkpoint");
    }
    const auto version = read_pod<std::uint32_t>(is);
    if (version != kFormatVersion) {
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    }
    const auto count = read_pod<std::uint32_t>(is);
    Mlp net;
    for (std::uint32_t i = 0; i < count; ++i) {
        const auto rows = read_pod<std::uint32_t>(is);
        const auto cols = read_pod<std::uint32_t>(is);
        const auto act = read_pod<std::uint32_t>(is);
        if (act > static_cast<std::uint32_t>(Activation::Tanh)) {
            throw std::runtime_error("corrupt checkpoint activation tag");
        }
        Layer l;
        l.weight.resize(rows, cols);
        l.bias.resize(rows);
        l.activation = static_cast<Activation>(act);
        is.read(reinterpret_cast<char*>(l.weight.data()), sizeof(double) * l.weight.size());
        is.read(reinterpret_cast<char*>(l.bias.data()), sizeof(double) * l.bias.size());
        if (!is) {
            throw std::runtime_error("truncated checkpoint");
        }
        if (!net.layers_.empty() && net.layers_.back().weight.rows() != l.weight.cols()) {
            throw std::runtime_error("checkpoint layer shapes do not chain");
        }
        net.layers_.push_back(std::move(l));
    }
    return net;
}

void Mlp::save_file(const std::string& path) const
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error("cannot open " + path + " for writing");
    }
    save(os);
}

Mlp Mlp::load_file(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw std::runtime_error("cannot open " + path);
    }
    return load(is);
}

void soft_update(Mlp& target, const Mlp& online, double rate)
{
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw std::domain_error("soft update rate must lie in [0, 1]");
    }
    auto& t = target.layers();
    const auto& o = online.layers();
    if (t.size() != o.size()) {
        throw std::invalid_argument("soft update between differently shaped networks");
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i].weight = rate * o[i].weight + (1.0 - rate) * t[i].weight;
        t[i].bias = rate * o[i].bias + (1.0 - rate) * t[i].bias;
    }
}

double parameter_distance(const Mlp& a, const Mlp& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.layers().size(); ++i) {
        d += (a.layers()[i].weight - b.layers()[i].weight).squaredNorm();
        d += (a.layers()[i].bias - b.layers()[i].bias).squaredNorm();
    }
    return d;
}

} // namespace starsec::rl
