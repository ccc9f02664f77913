#pragma once

#include "starsec/channel.hpp"
#include "starsec/isac.hpp"
#include "starsec/star_ris.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace starsec::isac {

enum class Protocol { Es, Ts };
enum class Architecture { Star, DoubleSpliced, Conventional };

struct EnvConfig {
    channel::Dimensions dims;
    channel::SystemGeometry geometry = channel::SystemGeometry::desk_default(2);
    channel::FadingParams fading;
    Protocol protocol = Protocol::Es;
    Architecture architecture = Architecture::Star;
    double power_budget = 1.0; // W
    double noise = 1e-12;      // W, shared by LUs, Eve and the sensing receiver
    double rate_floor = 1.0;   // bps/Hz
    SensingParams sensing;     // threshold is linear
    int horizon = 30;
    bool redraw_tau = false;

    void validate() const;
};

class EpisodeStateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

struct StepOutcome {
    VectorXd next_state;
    double reward = 0.0;
    std::vector<double> lu_rates;
    std::vector<double> eve_rates;
    std::vector<double> st_rates;
    double sum_secrecy = 0.0;
    double echo_snr = 0.0;
    bool power_ok = true;
    bool rates_ok = false;
    bool echo_ok = false;
    bool terminal = false;
};

// Physical quantities for one slot under a decoded action.
struct SlotEvaluation {
    std::vector<double> lu_rates;
    std::vector<double> eve_rates;
    std::vector<double> st_rates;
    double sum_secrecy = 0.0;
    double echo_snr = 0.0;
};

class IsacEnv {
public:
    explicit IsacEnv(EnvConfig cfg);

    int state_dim() const { return state_dim_; }
    int action_dim() const { return action_dim_; }
    int beam_action_dim() const;
    int surface_action_dim() const;
    const EnvConfig& config() const { return cfg_; }

    VectorXd reset(std::uint64_t episode_seed);
    StepOutcome step(std::span<const double> action);
    bool done() const { return slot_ >= cfg_.horizon; }
    int slot() const { return slot_; }
    const channel::ChannelRealization& current_channel() const;

    TransmitDesign decode_beamformers(std::span<const double> action) const;
    // Reflection / transmission diagonals under the ES signal model (STAR-ES and baselines).
    ris::CoefficientDiagonals decode_surface_es(std::span<const double> action) const;
    ris::TsConfig decode_surface_ts(std::span<const double> action) const;

    SlotEvaluation evaluate(const channel::ChannelRealization& ch, std::span<const double> action,
                            double tau) const;

private:
    VectorXd build_state(const channel::ChannelRealization& ch) const;

    EnvConfig cfg_;
    channel::LinkLosses losses_;
    int state_dim_ = 0;
    int action_dim_ = 0;
    std::vector<channel::ChannelRealization> episode_;
    int slot_ = 0;
    bool active_ = false;
    VectorXd prev_action_;
    double prev_reward_ = 0.0;
    Rng tau_rng_;
    double tau_ = 1.0;
};

int channel_feature_count(const channel::Dimensions& dims);

} // namespace starsec::isac
