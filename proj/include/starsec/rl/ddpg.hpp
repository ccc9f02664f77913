#pragma once

#include "starsec/rl/mlp.hpp"
#include "starsec/rl/optim.hpp"
#include "starsec/rl/replay_buffer.hpp"

#include <cstdint>

namespace starsec::rl {

struct DdpgOptions {
    int hidden = 256;
    int hidden_layers = 2;
    double actor_lr = 1e-4;
    double critic_lr = 1e-4;
    double gamma = 0.99;
    double soft_rate = 0.0005;
    double noise_start = 0.2;
    double noise_end = 0.05;
};

// Deterministic actor-critic with target copies of both networks.
class DdpgAgent {
public:
    DdpgAgent(int state_dim, int action_dim, DdpgOptions opts, std::uint64_t seed);

    int state_dim() const { return state_dim_; }
    int action_dim() const { return action_dim_; }
    const DdpgOptions& options() const { return opts_; }

    // tanh actor output, plus N(0, noise_scale^2) when exploring, clipped to [-1, 1].
    VectorXd select_action(const VectorXd& state, bool explore, double noise_scale, Rng& rng) const;

    // y = r + gamma * c * Qbar(s', actor_bar(s')), target networks only.
    VectorXd target_value(const Batch& batch) const;

    // J = mean (y - Q(s,a))^2 and its gradient w.r.t. the critic.
    double critic_loss(const Batch& batch, const VectorXd& targets, Gradients* grads) const;
    // J = mean Q(s, actor(s)) and its gradient w.r.t. the actor (critic held fixed).
    double actor_objective(const Batch& batch, Gradients* grads) const;

    double critic_update(const Batch& batch); // returns the pre-step loss
    double actor_update(const Batch& batch);  // returns the pre-step objective
    void update_targets();

    Mlp& actor() { return actor_; }
    Mlp& critic() { return critic_; }
    const Mlp& actor() const { return actor_; }
    const Mlp& critic() const { return critic_; }
    const Mlp& target_actor() const { return target_actor_; }
    const Mlp& target_critic() const { return target_critic_; }
    Mlp& target_actor() { return target_actor_; }
    Mlp& target_critic() { return target_critic_; }
    Adam& actor_optimizer() { return actor_opt_; }
    Adam& critic_optimizer() { return critic_opt_; }

private:
    int state_dim_;
    int action_dim_;
    DdpgOptions opts_;
    Mlp actor_;
    Mlp critic_;
    Mlp target_actor_;
    Mlp target_critic_;
    Adam actor_opt_;
    Adam critic_opt_;
};

MatrixXd stack_rows(const MatrixXd& top, const MatrixXd& bottom);
std::vector<int> layer_sizes(int in, int hidden, int hidden_layers, int out);

} // namespace starsec::rl
