#pragma once

#include "starsec/isac_env.hpp"
#include "starsec/rl/replay_buffer.hpp"

// A cheap environment and random batches for agent tests.

inline starsec::isac::EnvConfig small_env_config()
{
    starsec::isac::EnvConfig cfg;
    cfg.dims = {2, 4, 1};
    cfg.geometry = starsec::channel::SystemGeometry::desk_default(1);
    cfg.power_budget = 1.0;
    cfg.noise = 1e-12;
    cfg.sensing.noise = 1e-12;
    cfg.sensing.tau = 1e5;
    return cfg;
}

inline starsec::rl::Batch random_batch(int state_dim, int action_dim, int d, starsec::Rng& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(-0.95, 0.95);
    starsec::rl::Batch b;
    b.states = starsec::MatrixXd::NullaryExpr(state_dim, d, [&] { return n(rng); });
    b.actions = starsec::MatrixXd::NullaryExpr(action_dim, d, [&] { return u(rng); });
    b.next_states = starsec::MatrixXd::NullaryExpr(state_dim, d, [&] { return n(rng); });
    b.rewards = starsec::VectorXd::NullaryExpr(d, [&] { return n(rng); });
    b.continues = starsec::VectorXd::Ones(d);
    b.continues(d - 1) = 0.0;
    return b;
}

// Sets the output layer so the network returns `bias` for every input.
inline void make_constant(starsec::rl::Mlp& net, const starsec::VectorXd& bias)
{
    auto& last = net.layers().back();
    last.weight.setZero();
    last.bias = bias;
}
