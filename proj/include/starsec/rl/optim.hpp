#pragma once

#include "starsec/rl/mlp.hpp"

namespace starsec::rl {

struct AdamOptions {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected first/second moment updater for one network.
class Adam {
public:
    Adam() = default;
    Adam(const Mlp& net, AdamOptions opts);

    // Descends along `grads` (pass negated gradients to ascend).
    void step(Mlp& net, const Gradients& grads);

    double lr() const { return opts_.lr; }
    void set_lr(double lr) { opts_.lr = lr; }
    long steps() const { return t_; }

private:
    AdamOptions opts_;
    Gradients m_;
    Gradients v_;
    long t_ = 0;
};

// Adam on a single scalar parameter (SAC log-temperature).
class ScalarAdam {
public:
    explicit ScalarAdam(AdamOptions opts = {}) : opts_(opts) {}
    double step(double param, double grad);

private:
    AdamOptions opts_;
    double m_ = 0.0;
    double v_ = 0.0;
    long t_ = 0;
};

} // namespace starsec::rl
