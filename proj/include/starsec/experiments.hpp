#pragma once

#include "starsec/isac_env.hpp"
#include "starsec/rl/train.hpp"

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace starsec::exp {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Algorithm { Ddpg, Sac };

// Everything a run needs. Decibel fields keep the value as written; the linear
// twin next to each is filled by `set` at load time and is what the math uses.
struct ScenarioConfig {
    std::string name = "default";
    int antennas = 4;
    int elements = 12;
    int users = 2;
    int elements_per_row = 4;
    isac::Protocol protocol = isac::Protocol::Es;
    isac::Architecture architecture = isac::Architecture::Star;
    Algorithm algorithm = Algorithm::Sac;

    double power_dbm = 36.0;
    double power_w = dbm_to_watt(36.0);
    double noise_dbm = -90.0;
    double noise_w = dbm_to_watt(-90.0);
    double rate_floor = 1.0;
    double threshold_db = 1.0;
    double threshold = db_to_linear(1.0);
    double target_gain_db = 105.0;
    double tau = std::pow(10.0, 105.0 / 20.0);
    int sensing_slots = 1;
    bool redraw_tau = false;

    double rician_db = 3.0;
    double rician = db_to_linear(3.0);
    double carrier_ghz = 2.0;
    double receiver_height = 1.5;

    std::optional<Vector3d> bs_position;
    std::optional<Vector3d> ris_position;
    std::optional<Vector3d> ris_normal;
    std::optional<Vector3d> eve_position;
    std::optional<Vector3d> st_position;
    std::map<int, Vector3d> lu_positions;

    int horizon = 30;
    int episodes = 300;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    int batch_size = 64;
    std::size_t buffer_capacity = 1000000;
    std::size_t warmup = 0;
    int hidden = 256;
    int hidden_layers = 2;
    double actor_lr = 1e-4;
    double critic_lr = 1e-4;
    double gamma = 0.99;
    double soft_rate = 0.0005;
    double noise_start = 0.2;
    double noise_end = 0.05;
    double alpha_lr = 1e-3;
    double initial_alpha = 0.05;
    double target_entropy = std::numeric_limits<double>::quiet_NaN();

    // Applies one `key = value` setting; throws ConfigError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    // Cross-field checks; throws ConfigError.
    void validate() const;
};

// Every recognised key, in echo order.
const std::vector<std::string>& config_keys();

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
// Resolved snapshot in the same key = value syntax, loadable by parse_config.
std::string echo_config(const ScenarioConfig& cfg);

std::string to_string(Algorithm a);
std::string to_string(isac::Protocol p);
std::string to_string(isac::Architecture a);

isac::EnvConfig environment_config(const ScenarioConfig& cfg);
// Environment for the configured surface variant (STAR, double-spliced or conventional).
isac::IsacEnv build_baseline(const ScenarioConfig& cfg);

struct SeedSummary {
    std::uint64_t seed = 0;
    int episodes = 0;
    double first_return = 0.0; // mean return over the first min(50, E) episodes
    double final_return = 0.0; // mean return over the last min(50, E) episodes
    double mean_secrecy = 0.0; // mean per-step sum secrecy over the last min(50, E) episodes
};

struct SeedRun {
    SeedSummary summary;
    std::vector<rl::StepRecord> steps;
    std::vector<double> episode_ms; // wall time of each episode
};

// Recomputes the summary of one seed from its per-step rows.
SeedSummary summarize(std::uint64_t seed, const std::vector<rl::StepRecord>& steps, int window = 50);

struct Aggregate {
    double mean = 0.0;
    double std = 0.0; // sample standard deviation, 0 for one seed
};
Aggregate aggregate(const std::vector<double>& xs);

// Trains one agent on one seed.
SeedRun run_seed(const ScenarioConfig& cfg, std::uint64_t seed);

struct ScenarioResult {
    std::string axis;  // "none" for plain runs
    std::string value; // axis value as given
    std::vector<SeedRun> runs;
};

// Trains every seed (in parallel up to `jobs`) and writes episodes.csv, summary.csv,
// timing.csv and config.echo into `out_dir`.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, int jobs = 0);

// Canonical config key driven by a sweep axis; throws ConfigError for unsupported axes.
std::vector<std::string> axis_keys(const std::string& axis);

// One run per value x seed; long-format output keyed by axis value.
std::vector<ScenarioResult> sweep(const ScenarioConfig& cfg, const std::string& axis,
                                  const std::vector<std::string>& values, const std::filesystem::path& out_dir,
                                  int jobs = 0);

// Same as sweep without touching the filesystem.
std::vector<ScenarioResult> sweep_in_memory(const ScenarioConfig& cfg, const std::string& axis,
                                            const std::vector<std::string>& values, int jobs = 0);

struct RuntimeStats {
    double mean_ms = 0.0;
    double std_ms = 0.0;
    int timed_episodes = 0;
};

// Mean wall time per episode with gradient updates active, excluding `warmup_episodes`.
RuntimeStats measure_runtime(const ScenarioConfig& cfg, std::uint64_t seed, int timed_episodes = 20,
                             int warmup_episodes = 5);

void write_episodes_csv(const std::filesystem::path& path, const std::string& scenario,
                        const std::vector<ScenarioResult>& results);
void write_summary_csv(const std::filesystem::path& path, const std::string& scenario,
                       const std::vector<ScenarioResult>& results);
void write_timing_csv(const std::filesystem::path& path, const std::string& scenario,
                      const std::vector<ScenarioResult>& results);

// printf %.17g, enough to round-trip any double.
std::string format_double(double x);

} // namespace starsec::exp
