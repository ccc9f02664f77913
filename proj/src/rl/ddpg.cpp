#include "starsec/rl/ddpg.hpp"

#include <stdexcept>

namespace starsec::rl {

MatrixXd stack_rows(const MatrixXd& top, const MatrixXd& bottom)
{
    MatrixXd out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

std::vector<int> layer_sizes(int in, int hidden, int hidden_layers, int out)
{
    std::vector<int> sizes{in};
    for (int i = 0; i < hidden_layers; ++i) sizes.push_back(hidden);
    sizes.push_back(out);
    return sizes;
}

DdpgAgent::DdpgAgent(int state_dim, int action_dim, DdpgOptions opts, std::uint64_t seed)
    : state_dim_(state_dim)
    , action_dim_(action_dim)
    , opts_(opts)
{
    if (state_dim < 1 || action_dim < 1) {
        throw std::invalid_argument("state and action dimensions must be positive");
    }
    if (!(opts.gamma >= 0.0 && opts.gamma <= 1.0)) {
        throw std::invalid_argument("discount must lie in [0, 1]");
    }
    Rng rng = make_stream(seed, 0xDD96);
    actor_ = Mlp(layer_sizes(state_dim, opts.hidden, opts.hidden_layers, action_dim), Activation::Tanh, rng);
    critic_ = Mlp(layer_sizes(state_dim + action_dim, opts.hidden, opts.hidden_layers, 1), Activation::Identity, rng);
    target_actor_ = actor_;
    target_critic_ = critic_;
    actor_opt_ = Adam(actor_, AdamOptions{.lr = opts.actor_lr});
    critic_opt_ = Adam(critic_, AdamOptions{.lr = opts.critic_lr});
}

VectorXd DdpgAgent::select_action(const VectorXd& state, bool explore, double noise_scale, Rng& rng) const
{
    VectorXd a = actor_.forward(state);
    if (explore && noise_scale > 0.0) {
        std::normal_distribution<double> n(0.0, noise_scale);
        for (Eigen::Index i = 0; i < a.size(); ++i) a(i) += n(rng);
    }
    return a.cwiseMax(-1.0).cwiseMin(1.0);
}

VectorXd DdpgAgent::target_value(const Batch& batch) const
{
    const MatrixXd next_actions = target_actor_.forward(batch.next_states);
    const MatrixXd q = target_critic_.forward(stack_rows(batch.next_states, next_actions));
    return batch.rewards + opts_.gamma * batch.continues.cwiseProduct(q.row(0).transpose());
}

double DdpgAgent::critic_loss(const Batch& batch, const VectorXd& targets, Gradients* grads) const
{
    ForwardCache cache;
    const MatrixXd q = critic_.forward(stack_rows(batch.states, batch.actions), grads ? &cache : nullptr);
    const VectorXd residual = q.row(0).transpose() - targets;
    const double d = batch.size();
    if (grads) {
        *grads = critic_.zero_gradients();
        const MatrixXd grad_out = (2.0 / d) * residual.transpose();
        critic_.accumulate_gradients(cache, grad_out, *grads);
    }
    return residual.squaredNorm() / d;
}

double DdpgAgent::actor_objective(const Batch& batch, Gradients* grads) const
{
    ForwardCache actor_cache;
    ForwardCache critic_cache;
    const MatrixXd actions = actor_.forward(batch.states, &actor_cache);
    const MatrixXd q = critic_.forward(stack_rows(batch.states, actions), &critic_cache);
    const double d = batch.size();
    if (grads) {
        const MatrixXd grad_q = MatrixXd::Constant(1, batch.size(), 1.0 / d);
        const MatrixXd grad_in = critic_.input_gradient(critic_cache, grad_q);
        *grads = actor_.zero_gradients();
        actor_.accumulate_gradients(actor_cache, grad_in.bottomRows(action_dim_), *grads);
    }
    return q.sum() / d;
}

double DdpgAgent::critic_update(const Batch& batch)
{
    const VectorXd y = target_value(batch);
    Gradients g;
    const double loss = critic_loss(batch, y, &g);
    critic_opt_.step(critic_, g);
    return loss;
}

double DdpgAgent::actor_update(const Batch& batch)
{
    Gradients g;
    const double objective = actor_objective(batch, &g);
    for (auto& w : g.weight) w = -w;
    for (auto& b : g.bias) b = -b;
    actor_opt_.step(actor_, g); // ascent
    return objective;
}

void DdpgAgent::update_targets()
{
    soft_update(target_actor_, actor_, opts_.soft_rate);
    soft_update(target_critic_, critic_, opts_.soft_rate);
}

} // namespace starsec::rl
