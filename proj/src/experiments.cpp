#include "starsec/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace starsec::exp {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what)
{
    throw ConfigError("invalid value '" + value + "' for " + key + ": expected " + what);
}

double to_double(const std::string& key, const std::string& v)
{
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(x)) bad_value(key, v, "a finite number");
    return x;
}

long long to_integer(const std::string& key, const std::string& v)
{
    long long x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc{} || p != v.data() + v.size()) bad_value(key, v, "an integer");
    return x;
}

int to_int(const std::string& key, const std::string& v)
{
    const long long x = to_integer(key, v);
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        bad_value(key, v, "an integer in int range");
    }
    return static_cast<int>(x);
}

std::size_t to_size(const std::string& key, const std::string& v)
{
    const long long x = to_integer(key, v);
    if (x < 0) bad_value(key, v, "a non-negative integer");
    return static_cast<std::size_t>(x);
}

bool to_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    bad_value(key, v, "true or false");
}

Vector3d to_vec3(const std::string& key, const std::string& v)
{
    const auto parts = split(v, ',');
    if (parts.size() != 3) bad_value(key, v, "three comma-separated numbers");
    return {to_double(key, parts[0]), to_double(key, parts[1]), to_double(key, parts[2])};
}

std::vector<std::uint64_t> to_seeds(const std::string& key, const std::string& v)
{
    std::vector<std::uint64_t> seeds;
    for (const auto& p : split(v, ',')) {
        std::uint64_t x = 0;
        const auto [end, ec] = std::from_chars(p.data(), p.data() + p.size(), x);
        if (p.empty() || ec != std::errc{} || end != p.data() + p.size()) {
            bad_value(key, v, "comma-separated non-negative integers");
        }
        seeds.push_back(x);
    }
    if (seeds.empty()) bad_value(key, v, "at least one seed");
    return seeds;
}

std::string vec3_text(const Vector3d& v)
{
    return format_double(v.x()) + ", " + format_double(v.y()) + ", " + format_double(v.z());
}

Algorithm parse_algorithm(const std::string& key, const std::string& v)
{
    if (v == "ddpg") return Algorithm::Ddpg;
    if (v == "sac") return Algorithm::Sac;
    bad_value(key, v, "ddpg or sac");
}

isac::Protocol parse_protocol(const std::string& key, const std::string& v)
{
    if (v == "es") return isac::Protocol::Es;
    if (v == "ts") return isac::Protocol::Ts;
    bad_value(key, v, "es or ts");
}

isac::Architecture parse_architecture(const std::string& key, const std::string& v)
{
    if (v == "star") return isac::Architecture::Star;
    if (v == "spliced") return isac::Architecture::DoubleSpliced;
    if (v == "conventional") return isac::Architecture::Conventional;
    bad_value(key, v, "star, spliced or conventional");
}

struct Field {
    std::string key;
    std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

#define STARSEC_FIELD(KEY, SETTER, GETTER)                                                                  \
    Field                                                                                                   \
    {                                                                                                       \
        KEY, [](ScenarioConfig & c, const std::string& k, const std::string& v) { SETTER; },               \
            [](const ScenarioConfig& c) -> std::string { return GETTER; }                                  \
    }

const std::vector<Field>& fields()
{
    static const std::vector<Field> table = {
        STARSEC_FIELD("scenario.name", (void)k; if (v.empty()) bad_value(k, v, "a non-empty name"); c.name = v,
                      c.name),
        STARSEC_FIELD("system.antennas", c.antennas = to_int(k, v), std::to_string(c.antennas)),
        STARSEC_FIELD("system.elements", c.elements = to_int(k, v), std::to_string(c.elements)),
        STARSEC_FIELD("system.users", c.users = to_int(k, v), std::to_string(c.users)),
        STARSEC_FIELD("system.elements_per_row", c.elements_per_row = to_int(k, v),
                      std::to_string(c.elements_per_row)),
        STARSEC_FIELD("system.protocol", c.protocol = parse_protocol(k, v), to_string(c.protocol)),
        STARSEC_FIELD("system.baseline", c.architecture = parse_architecture(k, v), to_string(c.architecture)),
        STARSEC_FIELD("link.power_dbm", c.power_dbm = to_double(k, v); c.power_w = dbm_to_watt(c.power_dbm),
                      format_double(c.power_dbm)),
        STARSEC_FIELD("link.noise_dbm", c.noise_dbm = to_double(k, v); c.noise_w = dbm_to_watt(c.noise_dbm),
                      format_double(c.noise_dbm)),
        STARSEC_FIELD("link.rate_floor", c.rate_floor = to_double(k, v), format_double(c.rate_floor)),
        STARSEC_FIELD("sensing.threshold_db", c.threshold_db = to_double(k, v);
                      c.threshold = db_to_linear(c.threshold_db), format_double(c.threshold_db)),
        STARSEC_FIELD("sensing.target_gain_db", c.target_gain_db = to_double(k, v);
                      c.tau = std::pow(10.0, c.target_gain_db / 20.0), format_double(c.target_gain_db)),
        STARSEC_FIELD("sensing.slots", c.sensing_slots = to_int(k, v), std::to_string(c.sensing_slots)),
        STARSEC_FIELD("sensing.redraw_gain", c.redraw_tau = to_bool(k, v), c.redraw_tau ? "true" : "false"),
        STARSEC_FIELD("channel.rician_db", c.rician_db = to_double(k, v); c.rician = db_to_linear(c.rician_db),
                      format_double(c.rician_db)),
        STARSEC_FIELD("channel.carrier_ghz", c.carrier_ghz = to_double(k, v), format_double(c.carrier_ghz)),
        STARSEC_FIELD("channel.receiver_height", c.receiver_height = to_double(k, v),
                      format_double(c.receiver_height)),
        STARSEC_FIELD("geometry.bs", c.bs_position = to_vec3(k, v),
                      vec3_text(environment_config(c).geometry.bs_position)),
        STARSEC_FIELD("geometry.ris", c.ris_position = to_vec3(k, v),
                      vec3_text(environment_config(c).geometry.ris_position)),
        STARSEC_FIELD("geometry.ris_normal", c.ris_normal = to_vec3(k, v),
                      vec3_text(environment_config(c).geometry.ris_normal)),
        STARSEC_FIELD("geometry.eve", c.eve_position = to_vec3(k, v),
                      vec3_text(environment_config(c).geometry.eve_position)),
        STARSEC_FIELD("geometry.st", c.st_position = to_vec3(k, v),
                      vec3_text(environment_config(c).geometry.st_position)),
        STARSEC_FIELD("train.algorithm", c.algorithm = parse_algorithm(k, v), to_string(c.algorithm)),
        STARSEC_FIELD("train.horizon", c.horizon = to_int(k, v), std::to_string(c.horizon)),
        STARSEC_FIELD("train.episodes", c.episodes = to_int(k, v), std::to_string(c.episodes)),
        STARSEC_FIELD("train.seeds", c.seeds = to_seeds(k, v), [&c] {
            std::string s;
            for (std::size_t i = 0; i < c.seeds.size(); ++i) s += (i ? "," : "") + std::to_string(c.seeds[i]);
            return s;
        }()),
        STARSEC_FIELD("train.batch_size", c.batch_size = to_int(k, v), std::to_string(c.batch_size)),
        STARSEC_FIELD("train.buffer_capacity", c.buffer_capacity = to_size(k, v),
                      std::to_string(c.buffer_capacity)),
        STARSEC_FIELD("train.warmup", c.warmup = to_size(k, v), std::to_string(c.warmup)),
        STARSEC_FIELD("train.hidden", c.hidden = to_int(k, v), std::to_string(c.hidden)),
        STARSEC_FIELD("train.hidden_layers", c.hidden_layers = to_int(k, v), std::to_string(c.hidden_layers)),
        STARSEC_FIELD("train.actor_lr", c.actor_lr = to_double(k, v), format_double(c.actor_lr)),
        STARSEC_FIELD("train.critic_lr", c.critic_lr = to_double(k, v), format_double(c.critic_lr)),
        STARSEC_FIELD("train.gamma", c.gamma = to_double(k, v), format_double(c.gamma)),
        STARSEC_FIELD("train.soft_rate", c.soft_rate = to_double(k, v), format_double(c.soft_rate)),
        STARSEC_FIELD("ddpg.noise_start", c.noise_start = to_double(k, v), format_double(c.noise_start)),
        STARSEC_FIELD("ddpg.noise_end", c.noise_end = to_double(k, v), format_double(c.noise_end)),
        STARSEC_FIELD("sac.alpha_lr", c.alpha_lr = to_double(k, v), format_double(c.alpha_lr)),
        STARSEC_FIELD("sac.initial_alpha", c.initial_alpha = to_double(k, v), format_double(c.initial_alpha)),
        STARSEC_FIELD("sac.target_entropy",
                      c.target_entropy = v == "auto" ? std::numeric_limits<double>::quiet_NaN() : to_double(k, v),
                      std::isnan(c.target_entropy) ? std::string("auto") : format_double(c.target_entropy)),
    };
    return table;
}

#undef STARSEC_FIELD

constexpr std::string_view kLuPrefix = "geometry.lu.";

void check(bool ok, const std::string& message)
{
    if (!ok) throw ConfigError(message);
}

// Runs `tasks` on up to `jobs` threads and rethrows the first failure in task order.
void run_parallel(std::vector<std::function<void()>>& tasks, int jobs)
{
    if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    jobs = std::min<int>(jobs, static_cast<int>(tasks.size()));
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

void prepare_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    auto out = open_output(path);
    out << text;
    finish(out, path);
}

} // namespace

std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_string(Algorithm a)
{
    return a == Algorithm::Ddpg ? "ddpg" : "sac";
}

std::string to_string(isac::Protocol p)
{
    return p == isac::Protocol::Es ? "es" : "ts";
}

std::string to_string(isac::Architecture a)
{
    switch (a) {
    case isac::Architecture::Star: return "star";
    case isac::Architecture::DoubleSpliced: return "spliced";
    case isac::Architecture::Conventional: return "conventional";
    }
    return "star";
}

void ScenarioConfig::set(const std::string& key, const std::string& value)
{
    if (key.starts_with(kLuPrefix)) {
        const int m = to_int(key, key.substr(kLuPrefix.size()));
        check(m >= 0, "LU index must be non-negative in " + key);
        lu_positions[m] = to_vec3(key, value);
        return;
    }
    for (const auto& f : fields()) {
        if (f.key == key) {
            f.set(*this, key, value);
            return;
        }
    }
    if (key == "train.lr") {
        actor_lr = critic_lr = to_double(key, value);
        return;
    }
    throw ConfigError("unknown config key '" + key + "'");
}

void ScenarioConfig::validate() const
{
    check(antennas > 0 && elements > 0 && users > 0, "system counts must be positive");
    check(elements_per_row > 0, "system.elements_per_row must be positive");
    check(horizon > 0 && episodes > 0, "train.horizon and train.episodes must be positive");
    check(!seeds.empty(), "train.seeds must not be empty");
    check(batch_size > 0 && buffer_capacity >= static_cast<std::size_t>(batch_size),
          "train.batch_size must be positive and fit in the buffer");
    check(hidden > 0 && hidden_layers >= 0, "network shape must be positive");
    check(actor_lr >= 0.0 && critic_lr >= 0.0 && alpha_lr >= 0.0, "learning rates must be non-negative");
    check(gamma >= 0.0 && gamma <= 1.0, "train.gamma must lie in [0, 1]");
    check(soft_rate >= 0.0 && soft_rate <= 1.0, "train.soft_rate must lie in [0, 1]");
    check(noise_start >= 0.0 && noise_end >= 0.0, "exploration noise must be non-negative");
    check(initial_alpha > 0.0, "sac.initial_alpha must be positive");
    check(rate_floor >= 0.0, "link.rate_floor must be non-negative");
    check(carrier_ghz > 0.0, "channel.carrier_ghz must be positive");
    check(sensing_slots > 0, "sensing.slots must be positive");
    for (const auto& [m, p] : lu_positions) {
        check(m < users, "geometry.lu." + std::to_string(m) + " exceeds system.users");
    }
    try {
        environment_config(*this).validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

const std::vector<std::string>& config_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& f : fields()) k.push_back(f.key);
        return k;
    }();
    return keys;
}

ScenarioConfig parse_config(const std::string& text)
{
    ScenarioConfig cfg;
    std::istringstream in(text);
    std::string line;
    for (int lineno = 1; std::getline(in, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        try {
            cfg.set(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    try {
        return parse_config(text.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string echo_config(const ScenarioConfig& cfg)
{
    std::ostringstream out;
    for (const auto& f : fields()) out << f.key << " = " << f.get(cfg) << '\n';
    const auto env = environment_config(cfg);
    for (std::size_t m = 0; m < env.geometry.lu_positions.size(); ++m) {
        out << kLuPrefix << m << " = " << vec3_text(env.geometry.lu_positions[m]) << '\n';
    }
    out << "# derived: power_w = " << format_double(cfg.power_w) << ", noise_w = " << format_double(cfg.noise_w)
        << ", threshold = " << format_double(cfg.threshold) << ", tau = " << format_double(cfg.tau)
        << ", rician = " << format_double(cfg.rician) << '\n';
    return out.str();
}

isac::EnvConfig environment_config(const ScenarioConfig& cfg)
{
    isac::EnvConfig env;
    env.dims = channel::Dimensions{cfg.antennas, cfg.elements, cfg.users};

    channel::SystemGeometry g = channel::SystemGeometry::desk_default(cfg.users);
    if (cfg.ris_position) {
        // default nodes keep their placement relative to the surface
        const Vector3d shift = *cfg.ris_position - g.ris_position;
        g.ris_position += shift;
        for (auto& p : g.lu_positions) p += shift;
        g.eve_position += shift;
        g.st_position += shift;
    }
    if (cfg.bs_position) g.bs_position = *cfg.bs_position;
    if (cfg.ris_normal) g.ris_normal = cfg.ris_normal->normalized();
    if (cfg.eve_position) g.eve_position = *cfg.eve_position;
    if (cfg.st_position) g.st_position = *cfg.st_position;
    for (const auto& [m, p] : cfg.lu_positions) {
        if (m < static_cast<int>(g.lu_positions.size())) g.lu_positions[m] = p;
    }
    env.geometry = g;

    env.fading.rician_factor = cfg.rician;
    env.fading.carrier_ghz = cfg.carrier_ghz;
    env.fading.elements_per_row = cfg.elements_per_row;
    env.fading.receiver_height = cfg.receiver_height;
    env.protocol = cfg.protocol;
    env.architecture = cfg.architecture;
    env.power_budget = cfg.power_w;
    env.noise = cfg.noise_w;
    env.rate_floor = cfg.rate_floor;
    env.sensing.tau = cfg.tau;
    env.sensing.slots = cfg.sensing_slots;
    env.sensing.noise = cfg.noise_w;
    env.sensing.threshold = cfg.threshold;
    env.horizon = cfg.horizon;
    env.redraw_tau = cfg.redraw_tau;
    return env;
}

isac::IsacEnv build_baseline(const ScenarioConfig& cfg)
{
    try {
        return isac::IsacEnv(environment_config(cfg));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

SeedSummary summarize(std::uint64_t seed, const std::vector<rl::StepRecord>& steps, int window)
{
    SeedSummary s;
    s.seed = seed;
    std::vector<double> returns;
    std::vector<double> secrecy_sum;
    std::vector<int> secrecy_count;
    for (const auto& r : steps) {
        if (r.episode >= static_cast<int>(returns.size())) {
            returns.resize(r.episode + 1, 0.0);
            secrecy_sum.resize(r.episode + 1, 0.0);
            secrecy_count.resize(r.episode + 1, 0);
        }
        returns[r.episode] += r.reward;
        secrecy_sum[r.episode] += r.sum_secrecy;
        secrecy_count[r.episode] += 1;
    }
    const int e = static_cast<int>(returns.size());
    s.episodes = e;
    if (e == 0) return s;
    const int w = std::min(window, e);
    double first = 0.0;
    double last = 0.0;
    double sec = 0.0;
    int sec_n = 0;
    for (int i = 0; i < w; ++i) first += returns[i];
    for (int i = e - w; i < e; ++i) {
        last += returns[i];
        sec += secrecy_sum[i];
        sec_n += secrecy_count[i];
    }
    s.first_return = first / w;
    s.final_return = last / w;
    s.mean_secrecy = sec_n > 0 ? sec / sec_n : 0.0;
    return s;
}

Aggregate aggregate(const std::vector<double>& xs)
{
    Aggregate a;
    if (xs.empty()) return a;
    double sum = 0.0;
    for (double x : xs) sum += x;
    a.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - a.mean) * (x - a.mean);
        a.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return a;
}

SeedRun run_seed(const ScenarioConfig& cfg, std::uint64_t seed)
{
    isac::IsacEnv env = build_baseline(cfg);
    rl::TrainOptions topts;
    topts.episodes = cfg.episodes;
    topts.batch_size = cfg.batch_size;
    topts.buffer_capacity = cfg.buffer_capacity;
    topts.warmup = cfg.warmup;
    topts.seed = seed;

    SeedRun run;
    run.steps.reserve(static_cast<std::size_t>(cfg.episodes) * cfg.horizon);
    auto sink = [&run](const rl::StepRecord& r) { run.steps.push_back(r); };

    if (cfg.algorithm == Algorithm::Ddpg) {
        rl::DdpgOptions o;
        o.hidden = cfg.hidden;
        o.hidden_layers = cfg.hidden_layers;
        o.actor_lr = cfg.actor_lr;
        o.critic_lr = cfg.critic_lr;
        o.gamma = cfg.gamma;
        o.soft_rate = cfg.soft_rate;
        o.noise_start = cfg.noise_start;
        o.noise_end = cfg.noise_end;
        rl::DdpgAgent agent(env.state_dim(), env.action_dim(), o, seed);
        rl::train_ddpg(env, agent, topts, sink);
    } else {
        rl::SacOptions o;
        o.hidden = cfg.hidden;
        o.hidden_layers = cfg.hidden_layers;
        o.policy_lr = cfg.actor_lr;
        o.critic_lr = cfg.critic_lr;
        o.alpha_lr = cfg.alpha_lr;
        o.initial_alpha = cfg.initial_alpha;
        o.gamma = cfg.gamma;
        o.soft_rate = cfg.soft_rate;
        o.target_entropy = cfg.target_entropy;
        rl::SacAgent agent(env.state_dim(), env.action_dim(), o, seed);
        rl::train_sac(env, agent, topts, sink);
    }

    run.summary = summarize(seed, run.steps);
    run.episode_ms.assign(cfg.episodes, 0.0);
    double prev = 0.0;
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        const bool last_of_episode = i + 1 == run.steps.size() || run.steps[i + 1].episode != run.steps[i].episode;
        if (last_of_episode) {
            run.episode_ms[run.steps[i].episode] = run.steps[i].wall_ms - prev;
            prev = run.steps[i].wall_ms;
        }
    }
    return run;
}

std::vector<std::string> axis_keys(const std::string& axis)
{
    if (axis == "lr") return {"train.actor_lr", "train.critic_lr"};
    if (axis == "N") return {"system.elements"};
    if (axis == "P0" || axis == "P_0" || axis == "power") return {"link.power_dbm"};
    if (axis == "kappa" || axis == "kappa_t" || axis == "κ_t") return {"sensing.threshold_db"};
    if (axis == "algorithm" || axis == "algo") return {"train.algorithm"};
    if (axis == "protocol") return {"system.protocol"};
    if (axis == "baseline") return {"system.baseline"};
    throw ConfigError("unsupported sweep axis '" + axis + "' (lr, N, P0, kappa, algorithm, protocol, baseline)");
}

std::vector<ScenarioResult> sweep_in_memory(const ScenarioConfig& cfg, const std::string& axis,
                                            const std::vector<std::string>& values, int jobs)
{
    const auto keys = axis_keys(axis);
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    std::vector<ScenarioConfig> configs;
    for (const auto& v : values) {
        ScenarioConfig c = cfg;
        for (const auto& k : keys) c.set(k, v);
        c.validate();
        configs.push_back(std::move(c));
    }

    std::vector<ScenarioResult> results(values.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t i = 0; i < values.size(); ++i) {
        results[i].axis = axis;
        results[i].value = values[i];
        results[i].runs.resize(configs[i].seeds.size());
        for (std::size_t s = 0; s < configs[i].seeds.size(); ++s) {
            tasks.emplace_back([&, i, s] { results[i].runs[s] = run_seed(configs[i], configs[i].seeds[s]); });
        }
    }
    run_parallel(tasks, jobs);
    return results;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, int jobs)
{
    cfg.validate();
    prepare_dir(out_dir);
    write_text(out_dir / "config.echo", echo_config(cfg));
    std::vector<ScenarioResult> results(1);
    results[0].axis = "none";
    results[0].runs.resize(cfg.seeds.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
        tasks.emplace_back([&, s] { results[0].runs[s] = run_seed(cfg, cfg.seeds[s]); });
    }
    run_parallel(tasks, jobs);
    write_episodes_csv(out_dir / "episodes.csv", cfg.name, results);
    write_summary_csv(out_dir / "summary.csv", cfg.name, results);
    write_timing_csv(out_dir / "timing.csv", cfg.name, results);
    return std::move(results[0]);
}

std::vector<ScenarioResult> sweep(const ScenarioConfig& cfg, const std::string& axis,
                                  const std::vector<std::string>& values, const std::filesystem::path& out_dir,
                                  int jobs)
{
    axis_keys(axis);
    prepare_dir(out_dir);
    write_text(out_dir / "config.echo", echo_config(cfg));
    auto results = sweep_in_memory(cfg, axis, values, jobs);
    write_episodes_csv(out_dir / "episodes.csv", cfg.name, results);
    write_summary_csv(out_dir / "summary.csv", cfg.name, results);
    write_timing_csv(out_dir / "timing.csv", cfg.name, results);
    return results;
}

RuntimeStats measure_runtime(const ScenarioConfig& cfg, std::uint64_t seed, int timed_episodes, int warmup_episodes)
{
    if (timed_episodes < 1 || warmup_episodes < 0) {
        throw ConfigError("runtime measurement needs at least one timed episode");
    }
    ScenarioConfig c = cfg;
    c.episodes = warmup_episodes + timed_episodes;
    // gradient steps must be active in every timed episode
    c.warmup = static_cast<std::size_t>(c.batch_size);
    c.validate();
    const SeedRun run = run_seed(c, seed);
    const std::vector<double> timed(run.episode_ms.begin() + warmup_episodes, run.episode_ms.end());
    const Aggregate a = aggregate(timed);
    return RuntimeStats{a.mean, a.std, timed_episodes};
}

void write_episodes_csv(const std::filesystem::path& path, const std::string& scenario,
                        const std::vector<ScenarioResult>& results)
{
    auto out = open_output(path);
    out << "scenario,axis,value,seed,episode,step,reward,sum_secrecy,lu_rates,echo_snr,power_ok,rates_ok,echo_ok\n";
    for (const auto& res : results) {
        for (const auto& run : res.runs) {
            for (const auto& r : run.steps) {
                std::string rates;
                for (std::size_t m = 0; m < r.lu_rates.size(); ++m) rates += (m ? ";" : "") + format_double(r.lu_rates[m]);
                out << scenario << ',' << res.axis << ',' << res.value << ',' << run.summary.seed << ',' << r.episode
                    << ',' << r.step << ',' << format_double(r.reward) << ',' << format_double(r.sum_secrecy) << ','
                    << rates << ',' << format_double(r.echo_snr) << ',' << int(r.power_ok) << ',' << int(r.rates_ok)
                    << ',' << int(r.echo_ok) << '\n';
            }
        }
    }
    finish(out, path);
}

void write_summary_csv(const std::filesystem::path& path, const std::string& scenario,
                       const std::vector<ScenarioResult>& results)
{
    auto out = open_output(path);
    out << "scenario,axis,value,seed,episodes,first50_return,final50_return,mean_secrecy\n";
    for (const auto& res : results) {
        std::vector<double> first;
        std::vector<double> final;
        std::vector<double> sec;
        const std::string prefix = scenario + ',' + res.axis + ',' + res.value + ',';
        int episodes = 0;
        for (const auto& run : res.runs) {
            const SeedSummary& s = run.summary;
            out << prefix << s.seed << ',' << s.episodes << ',' << format_double(s.first_return) << ','
                << format_double(s.final_return) << ',' << format_double(s.mean_secrecy) << '\n';
            first.push_back(s.first_return);
            final.push_back(s.final_return);
            sec.push_back(s.mean_secrecy);
            episodes = s.episodes;
        }
        const Aggregate f = aggregate(first);
        const Aggregate l = aggregate(final);
        const Aggregate m = aggregate(sec);
        out << prefix << "mean," << episodes << ',' << format_double(f.mean) << ',' << format_double(l.mean) << ','
            << format_double(m.mean) << '\n';
        out << prefix << "std," << episodes << ',' << format_double(f.std) << ',' << format_double(l.std) << ','
            << format_double(m.std) << '\n';
    }
    finish(out, path);
}

void write_timing_csv(const std::filesystem::path& path, const std::string& scenario,
                      const std::vector<ScenarioResult>& results)
{
    auto out = open_output(path);
    out << "scenario,axis,value,seed,episode,episode_ms\n";
    for (const auto& res : results) {
        for (const auto& run : res.runs) {
            for (std::size_t e = 0; e < run.episode_ms.size(); ++e) {
                out << scenario << ',' << res.axis << ',' << res.value << ',' << run.summary.seed << ',' << e << ','
                    << format_double(run.episode_ms[e]) << '\n';
            }
        }
    }
    finish(out, path);
}

} // namespace starsec::exp
