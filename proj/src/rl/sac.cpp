#include "starsec/rl/sac.hpp"

#include "starsec/rl/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace starsec::rl {

namespace {

const double kHalfLog2Pi = 0.5 * std::log(2.0 * kPi);

double softplus(double x)
{
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// log(1 - tanh(u)^2), stable for large |u|
double log_one_minus_tanh_sq(double u)
{
    return 2.0 * (std::log(2.0) - u - softplus(-2.0 * u));
}

} // namespace

SacAgent::SacAgent(int state_dim, int action_dim, SacOptions opts, std::uint64_t seed)
    : state_dim_(state_dim)
    , action_dim_(action_dim)
    , opts_(opts)
    , alpha_opt_(AdamOptions{.lr = opts.alpha_lr})
    , log_alpha_(std::log(opts.initial_alpha))
{
    if (state_dim < 1 || action_dim < 1) {
        throw std::invalid_argument("state and action dimensions must be positive");
    }
    if (!(opts.initial_alpha > 0.0)) {
        throw std::invalid_argument("initial temperature must be positive");
    }
    target_entropy_ = std::isnan(opts.target_entropy) ? -static_cast<double>(action_dim) : opts.target_entropy;
    Rng rng = make_stream(seed, 0x5AC);
    policy_ = Mlp(layer_sizes(state_dim, opts.hidden, opts.hidden_layers, 2 * action_dim), Activation::Identity, rng);
    for (int i = 0; i < 2; ++i) {
        critics_[i] =
            Mlp(layer_sizes(state_dim + action_dim, opts.hidden, opts.hidden_layers, 1), Activation::Identity, rng);
        target_critics_[i] = critics_[i];
        critic_opts_[i] = Adam(critics_[i], AdamOptions{.lr = opts.critic_lr});
    }
    policy_opt_ = Adam(policy_, AdamOptions{.lr = opts.policy_lr});
}

MatrixXd SacAgent::draw_noise(int cols, Rng& rng) const
{
    std::normal_distribution<double> n(0.0, 1.0);
    return MatrixXd::NullaryExpr(action_dim_, cols, [&]() { return n(rng); });
}

PolicySample SacAgent::sample_policy(const MatrixXd& states, const MatrixXd& noise) const
{
    PolicySample p;
    const MatrixXd out = policy_.forward(states, &p.cache);
    const int d = action_dim_;
    p.mean = out.topRows(d);
    const MatrixXd raw_log_std = out.bottomRows(d);
    p.clamped = (raw_log_std.array() < opts_.log_std_min) || (raw_log_std.array() > opts_.log_std_max);
    p.log_std = raw_log_std.cwiseMax(opts_.log_std_min).cwiseMin(opts_.log_std_max);
    p.noise = noise;
    p.pre_tanh = p.mean + (p.log_std.array().exp() * noise.array()).matrix();
    p.actions = p.pre_tanh.array().tanh().matrix();
    p.log_probs.resize(states.cols());
    for (Eigen::Index j = 0; j < states.cols(); ++j) {
        double lp = 0.0;
        for (int i = 0; i < d; ++i) {
            const double xi = noise(i, j);
            lp += -0.5 * xi * xi - p.log_std(i, j) - kHalfLog2Pi - log_one_minus_tanh_sq(p.pre_tanh(i, j));
        }
        p.log_probs(j) = lp;
    }
    return p;
}

PolicySample SacAgent::sample_policy(const MatrixXd& states, Rng& rng) const
{
    return sample_policy(states, draw_noise(static_cast<int>(states.cols()), rng));
}

std::pair<VectorXd, double> SacAgent::sample_action(const VectorXd& state, Rng& rng) const
{
    const PolicySample p = sample_policy(MatrixXd(state), rng);
    return {p.actions.col(0), p.log_probs(0)};
}

VectorXd SacAgent::deterministic_action(const VectorXd& state) const
{
    return policy_.forward(state).head(action_dim_).array().tanh().matrix();
}

VectorXd SacAgent::log_prob(const MatrixXd& states, const MatrixXd& actions) const
{
    const MatrixXd out = policy_.forward(states);
    const int d = action_dim_;
    VectorXd lp(states.cols());
    for (Eigen::Index j = 0; j < states.cols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            const double ls = std::clamp(out(d + i, j), opts_.log_std_min, opts_.log_std_max);
            const double u = std::atanh(actions(i, j));
            const double xi = (u - out(i, j)) / std::exp(ls);
            s += -0.5 * xi * xi - ls - kHalfLog2Pi - log_one_minus_tanh_sq(u);
        }
        lp(j) = s;
    }
    return lp;
}

VectorXd SacAgent::soft_q_target(const Batch& batch, const MatrixXd& noise) const
{
    const PolicySample next = sample_policy(batch.next_states, noise);
    const MatrixXd in = stack_rows(batch.next_states, next.actions);
    const VectorXd q1 = target_critics_[0].forward(in).row(0).transpose();
    const VectorXd q2 = target_critics_[1].forward(in).row(0).transpose();
    const VectorXd soft_v = q1.cwiseMin(q2) - alpha() * next.log_probs;
    return batch.rewards + opts_.gamma * batch.continues.cwiseProduct(soft_v);
}

double SacAgent::critic_loss(int which, const Batch& batch, const VectorXd& targets, Gradients* grads) const
{
    const Mlp& net = critics_[which];
    ForwardCache cache;
    const MatrixXd q = net.forward(stack_rows(batch.states, batch.actions), grads ? &cache : nullptr);
    const VectorXd residual = q.row(0).transpose() - targets;
    const double d = batch.size();
    if (grads) {
        *grads = net.zero_gradients();
        net.accumulate_gradients(cache, residual.transpose() / d, *grads);
    }
    return 0.5 * residual.squaredNorm() / d;
}

double SacAgent::policy_loss(const Batch& batch, const MatrixXd& noise, Gradients* grads) const
{
    const PolicySample p = sample_policy(batch.states, noise);
    const MatrixXd in = stack_rows(batch.states, p.actions);
    ForwardCache c1;
    ForwardCache c2;
    const VectorXd q1 = critics_[0].forward(in, &c1).row(0).transpose();
    const VectorXd q2 = critics_[1].forward(in, &c2).row(0).transpose();
    const double alpha = this->alpha();
    const double d = batch.size();
    const VectorXd qmin = q1.cwiseMin(q2);
    const double loss = (alpha * p.log_probs - qmin).sum() / d;
    if (!grads) {
        return loss;
    }

    // dJ/da through whichever critic attains the minimum
    MatrixXd w1 = MatrixXd::Zero(1, batch.size());
    MatrixXd w2 = MatrixXd::Zero(1, batch.size());
    for (int j = 0; j < batch.size(); ++j) {
        (q1(j) <= q2(j) ? w1 : w2)(0, j) = -1.0 / d;
    }
    const MatrixXd g1 = critics_[0].input_gradient(c1, w1);
    const MatrixXd g2 = critics_[1].input_gradient(c2, w2);
    const MatrixXd grad_a = (g1 + g2).bottomRows(action_dim_);

    const int na = action_dim_;
    const double grad_lp = alpha / d;
    MatrixXd grad_out(2 * na, batch.size());
    for (int j = 0; j < batch.size(); ++j) {
        for (int i = 0; i < na; ++i) {
            const double a = p.actions(i, j);
            const double du = grad_a(i, j) * (1.0 - a * a) + grad_lp * 2.0 * a;
            grad_out(i, j) = du;
            const double dls = du * std::exp(p.log_std(i, j)) * p.noise(i, j) - grad_lp;
            grad_out(na + i, j) = p.clamped(i, j) ? 0.0 : dls;
        }
    }
    *grads = policy_.zero_gradients();
    policy_.accumulate_gradients(p.cache, grad_out, *grads);
    return loss;
}

std::pair<double, double> SacAgent::temperature_loss(const VectorXd& log_probs) const
{
    const double alpha = this->alpha();
    const double mean_term = (-log_probs.array() - target_entropy_).mean();
    return {alpha * mean_term, alpha * mean_term};
}

std::pair<double, double> SacAgent::critic_update(const Batch& batch, Rng& rng)
{
    const VectorXd y = soft_q_target(batch, draw_noise(batch.size(), rng));
    Gradients g;
    const double j1 = critic_loss(0, batch, y, &g);
    critic_opts_[0].step(critics_[0], g);
    const double j2 = critic_loss(1, batch, y, &g);
    critic_opts_[1].step(critics_[1], g);
    return {j1, j2};
}

double SacAgent::policy_update(const Batch& batch, Rng& rng)
{
    Gradients g;
    const double loss = policy_loss(batch, draw_noise(batch.size(), rng), &g);
    policy_opt_.step(policy_, g);
    return loss;
}

double SacAgent::temperature_update(const Batch& batch, Rng& rng)
{
    const PolicySample p = sample_policy(batch.states, rng);
    const auto [loss, grad] = temperature_loss(p.log_probs);
    log_alpha_ = alpha_opt_.step(log_alpha_, grad);
    return loss;
}

void SacAgent::update_targets()
{
    for (int i = 0; i < 2; ++i) soft_update(target_critics_[i], critics_[i], opts_.soft_rate);
}

} // namespace starsec::rl
