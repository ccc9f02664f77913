#pragma once

#include "starsec/isac_env.hpp"
#include "starsec/rl/ddpg.hpp"
#include "starsec/rl/sac.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace starsec::rl {

// One row per environment step.
struct StepRecord {
    int episode = 0;
    int step = 0;
    double reward = 0.0;
    double sum_secrecy = 0.0;
    std::vector<double> lu_rates;
    double echo_snr = 0.0;
    bool power_ok = true;
    bool rates_ok = false;
    bool echo_ok = false;
    double wall_ms = 0.0; // cumulative since training start
};

struct TrainOptions {
    int episodes = 300;
    int batch_size = 64;
    std::size_t buffer_capacity = 1000000;
    // updates start once this many transitions are stored; 0 selects 10 * batch_size
    std::size_t warmup = 0;
    std::uint64_t seed = 1;
};

using StepSink = std::function<void(const StepRecord&)>;

// Channel seed of episode `e` for a run seeded with `seed`.
std::uint64_t episode_seed(std::uint64_t seed, int episode);

// Per step: act, observe, store, then one critic/actor/target update.
void train_ddpg(isac::IsacEnv& env, DdpgAgent& agent, const TrainOptions& opts, const StepSink& sink);

// Per episode: T environment steps, then T gradient steps of critics, policy, temperature, targets.
void train_sac(isac::IsacEnv& env, SacAgent& agent, const TrainOptions& opts, const StepSink& sink);

} // namespace starsec::rl
