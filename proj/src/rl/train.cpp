#include "starsec/rl/train.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

namespace starsec::rl {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

StepRecord make_record(int episode, int step, const isac::StepOutcome& out, Clock::time_point start)
{
    StepRecord r;
    r.episode = episode;
    r.step = step;
    r.reward = out.reward;
    r.sum_secrecy = out.sum_secrecy;
    r.lu_rates = out.lu_rates;
    r.echo_snr = out.echo_snr;
    r.power_ok = out.power_ok;
    r.rates_ok = out.rates_ok;
    r.echo_ok = out.echo_ok;
    r.wall_ms = elapsed_ms(start);
    return r;
}

void check_dims(const isac::IsacEnv& env, int state_dim, int action_dim)
{
    if (env.state_dim() != state_dim || env.action_dim() != action_dim) {
        throw std::invalid_argument("agent and environment dimensions disagree");
    }
}

std::size_t warmup_of(const TrainOptions& opts)
{
    return opts.warmup > 0 ? opts.warmup : static_cast<std::size_t>(10 * opts.batch_size);
}

} // namespace

std::uint64_t episode_seed(std::uint64_t seed, int episode)
{
    Rng r = make_stream(seed, 0xE9000000ULL + static_cast<std::uint64_t>(episode));
    return r();
}

void train_ddpg(isac::IsacEnv& env, DdpgAgent& agent, const TrainOptions& opts, const StepSink& sink)
{
    check_dims(env, agent.state_dim(), agent.action_dim());
    ReplayBuffer buffer(opts.buffer_capacity);
    Rng rng = make_stream(opts.seed, 0xACC);
    const std::size_t warmup = warmup_of(opts);
    const auto batch = static_cast<std::size_t>(opts.batch_size);
    const DdpgOptions& o = agent.options();
    const auto start = Clock::now();

    for (int ep = 0; ep < opts.episodes; ++ep) {
        const double frac = opts.episodes > 1 ? static_cast<double>(ep) / (opts.episodes - 1) : 1.0;
        const double noise = o.noise_start + (o.noise_end - o.noise_start) * frac;
        VectorXd state = env.reset(episode_seed(opts.seed, ep));
        for (int t = 0; !env.done(); ++t) {
            const VectorXd action = agent.select_action(state, true, noise, rng);
            isac::StepOutcome out = env.step(view(action));
            buffer.push(Transition{state, action, out.reward, out.next_state, out.terminal});
            if (buffer.size() >= warmup) {
                if (auto b = buffer.sample_batch(batch, rng)) {
                    agent.critic_update(*b);
                    agent.actor_update(*b);
                    agent.update_targets();
                }
            }
            if (sink) sink(make_record(ep, t, out, start));
            state = std::move(out.next_state);
        }
    }
}

void train_sac(isac::IsacEnv& env, SacAgent& agent, const TrainOptions& opts, const StepSink& sink)
{
    check_dims(env, agent.state_dim(), agent.action_dim());
    ReplayBuffer buffer(opts.buffer_capacity);
    Rng rng = make_stream(opts.seed, 0xACC);
    const std::size_t warmup = warmup_of(opts);
    const auto batch = static_cast<std::size_t>(opts.batch_size);
    const auto start = Clock::now();

    for (int ep = 0; ep < opts.episodes; ++ep) {
        VectorXd state = env.reset(episode_seed(opts.seed, ep));
        int steps = 0;
        std::vector<StepRecord> rows;
        for (int t = 0; !env.done(); ++t) {
            const VectorXd action = agent.sample_action(state, rng).first;
            isac::StepOutcome out = env.step(view(action));
            buffer.push(Transition{state, action, out.reward, out.next_state, out.terminal});
            rows.push_back(make_record(ep, t, out, start));
            state = std::move(out.next_state);
            ++steps;
        }
        if (buffer.size() >= warmup) {
            for (int g = 0; g < steps; ++g) {
                auto b = buffer.sample_batch(batch, rng);
                if (!b) break;
                agent.critic_update(*b, rng);
                agent.policy_update(*b, rng);
                agent.temperature_update(*b, rng);
                agent.update_targets();
            }
        }
        // the gradient steps belong to this episode's wall time
        const double now = elapsed_ms(start);
        for (auto& r : rows) {
            r.wall_ms = std::max(r.wall_ms, now);
            if (sink) sink(r);
        }
    }
}

} // namespace starsec::rl
