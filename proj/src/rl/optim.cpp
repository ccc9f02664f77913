#include "starsec/rl/optim.hpp"

#include <stdexcept>

namespace starsec::rl {

Adam::Adam(const Mlp& net, AdamOptions opts)
    : opts_(opts)
    , m_(net.zero_gradients())
    , v_(net.zero_gradients())
{
}

void Adam::step(Mlp& net, const Gradients& grads)
{
    auto& layers = net.layers();
    if (grads.weight.size() != layers.size() || m_.weight.size() != layers.size()) {
        throw std::invalid_argument("gradient shapes do not match the network");
    }
    ++t_;
    const double b1 = opts_.beta1;
    const double b2 = opts_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    const double lr = opts_.lr;
    const double eps = opts_.eps;

    auto update = [&](auto& param, const auto& g, auto& m, auto& v) {
        m = b1 * m + (1.0 - b1) * g;
        v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
        param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
    };
    for (std::size_t i = 0; i < layers.size(); ++i) {
        update(layers[i].weight, grads.weight[i], m_.weight[i], v_.weight[i]);
        update(layers[i].bias, grads.bias[i], m_.bias[i], v_.bias[i]);
    }
}

double ScalarAdam::step(double param, double grad)
{
    ++t_;
    m_ = opts_.beta1 * m_ + (1.0 - opts_.beta1) * grad;
    v_ = opts_.beta2 * v_ + (1.0 - opts_.beta2) * grad * grad;
    const double mh = m_ / (1.0 - std::pow(opts_.beta1, static_cast<double>(t_)));
    const double vh = v_ / (1.0 - std::pow(opts_.beta2, static_cast<double>(t_)));
    return param - opts_.lr * mh / (std::sqrt(vh) + opts_.eps);
}

} // namespace starsec::rl
