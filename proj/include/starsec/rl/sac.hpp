#pragma once

#include "starsec/rl/mlp.hpp"
#include "starsec/rl/optim.hpp"
#include "starsec/rl/replay_buffer.hpp"

#include <cstdint>
#include <limits>

namespace starsec::rl {

struct SacOptions {
    int hidden = 256;
    int hidden_layers = 2;
    double policy_lr = 1e-4;
    double critic_lr = 1e-4;
    double alpha_lr = 1e-3;
    double initial_alpha = 0.05;
    double gamma = 0.99;
    double soft_rate = 0.0005;
    // NaN selects -(action dimension)
    double target_entropy = std::numeric_limits<double>::quiet_NaN();
    double log_std_min = -20.0;
    double log_std_max = 2.0;
};

// Reparameterized draw a = tanh(mu + std * xi) for a batch of states.
struct PolicySample {
    MatrixXd actions;   // action_dim x D
    VectorXd log_probs; // D
    MatrixXd mean;      // pre-squash mean
    MatrixXd log_std;   // clamped
    MatrixXd pre_tanh;
    MatrixXd noise;
    ForwardCache cache;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> clamped;
};

// Maximum-entropy actor-critic: tanh-squashed Gaussian policy, twin critics with
// target copies, learned temperature.
class SacAgent {
public:
    SacAgent(int state_dim, int action_dim, SacOptions opts, std::uint64_t seed);

    int state_dim() const { return state_dim_; }
    int action_dim() const { return action_dim_; }
    const SacOptions& options() const { return opts_; }
    double alpha() const { return std::exp(log_alpha_); }
    double log_alpha() const { return log_alpha_; }
    void set_log_alpha(double v) { log_alpha_ = v; }
    double target_entropy() const { return target_entropy_; }

    PolicySample sample_policy(const MatrixXd& states, const MatrixXd& noise) const;
    PolicySample sample_policy(const MatrixXd& states, Rng& rng) const;
    // (action, log-prob) for one state.
    std::pair<VectorXd, double> sample_action(const VectorXd& state, Rng& rng) const;
    VectorXd deterministic_action(const VectorXd& state) const;
    // log pi(a|s) for given squashed actions in (-1, 1).
    VectorXd log_prob(const MatrixXd& states, const MatrixXd& actions) const;

    // r + gamma * c * (min(Qbar1, Qbar2)(s', a') - alpha log pi(a'|s')), a' drawn with `noise`.
    VectorXd soft_q_target(const Batch& batch, const MatrixXd& noise) const;

    // J_i = mean 1/2 (Q_i(s,a) - y)^2 for critic index 0 or 1.
    double critic_loss(int which, const Batch& batch, const VectorXd& targets, Gradients* grads) const;
    // J = mean (alpha log pi(a~|s) - min_i Q_i(s, a~)), a~ reparameterized with `noise`.
    double policy_loss(const Batch& batch, const MatrixXd& noise, Gradients* grads) const;
    // J(alpha) = mean(-alpha log pi - alpha H0); returns (J, dJ/dlog_alpha).
    std::pair<double, double> temperature_loss(const VectorXd& log_probs) const;

    std::pair<double, double> critic_update(const Batch& batch, Rng& rng);
    double policy_update(const Batch& batch, Rng& rng);
    double temperature_update(const Batch& batch, Rng& rng);
    void update_targets();

    Mlp& policy() { return policy_; }
    const Mlp& policy() const { return policy_; }
    Mlp& critic(int i) { return critics_[i]; }
    const Mlp& critic(int i) const { return critics_[i]; }
    const Mlp& target_critic(int i) const { return target_critics_[i]; }
    Mlp& target_critic(int i) { return target_critics_[i]; }
    Adam& policy_optimizer() { return policy_opt_; }

private:
    MatrixXd draw_noise(int cols, Rng& rng) const;

    int state_dim_;
    int action_dim_;
    SacOptions opts_;
    double target_entropy_;
    Mlp policy_;
    Mlp critics_[2];
    Mlp target_critics_[2];
    Adam policy_opt_;
    Adam critic_opts_[2];
    ScalarAdam alpha_opt_;
    double log_alpha_;
};

} // namespace starsec::rl
