// End-to-end acceptance run: one PASS/FAIL line per criterion. The training
// criteria (7-10) share one set of desk-scale runs, written under --out.

#include "gradcheck.hpp"
#include "support.hpp"

#include "starsec/experiments.hpp"
#include "starsec/runtime.hpp"

#include <CLI11.hpp>

#include <cfloat>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace starsec;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail)
{
    std::printf("criterion %2d %-28s %s  %s\n", id, name, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Draw {
    oracle::Instance in;
    channel::ChannelRealization ch;
    isac::TransmitDesign k;
    ris::CoefficientDiagonals phi;
};

Draw random_draw(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> Ld(1, 4), Nd(1, 8), Md(1, 3);
    Draw d;
    d.in = oracle::random_instance(Ld(rng), Nd(rng), Md(rng), rng);
    d.ch = support::to_channel(d.in);
    d.k = support::to_design(d.in);
    d.phi = support::to_phi(d.in);
    return d;
}

ris::TsConfig random_ts(oracle::Instance& in, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
    ris::TsConfig cfg{frac(rng), VectorXd(in.N), VectorXd(in.N)};
    for (int n = 0; n < in.N; ++n) {
        cfg.phase_a(n) = ang(rng);
        cfg.phase_b(n) = ang(rng);
        in.phi_a[n] = std::polar(1.0, cfg.phase_a(n));
        in.phi_b[n] = std::polar(1.0, cfg.phase_b(n));
    }
    return cfg;
}

void physics_oracle()
{
    const auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    isac::SensingParams s;
    s.tau = 1.3;
    s.slots = 3;
    s.noise = 0.7;
    const double noise = 0.2;
    double err = 0.0;
    auto track = [&](double a, double b) { err = std::max(err, std::abs(a - b)); };
    for (int t = 0; t < 100; ++t) {
        Draw d = random_draw(rng);
        auto& in = d.in;
        const auto h_e = oracle::effective_row(in.eve_d, in.eve_r, in.phi_b, in.H);
        const auto g_s = oracle::effective_row(in.st_d, in.st_r, in.phi_a, in.H);
        for (int m = 0; m < in.M; ++m) {
            const auto h_m = oracle::effective_row(in.lu_d[m], in.lu_r[m], in.phi_b, in.H);
            const double sm = oracle::sinr(h_m, in.K, m, noise);
            const double se = oracle::sinr(h_e, in.K, m, noise);
            const double ss = oracle::sinr(g_s, in.K, m, noise);
            track(isac::lu_sinr_es(m, d.ch, d.phi.transmit, d.k, noise), sm);
            track(isac::eve_sinr_es(m, d.ch, d.phi.transmit, d.k, noise), se);
            track(isac::st_sinr_es(m, d.ch, d.phi.reflect, d.k, noise), ss);
            track(isac::rate(sm), oracle::rate(sm));
            track(isac::secrecy_rate_es(m, d.ch, d.phi, d.k, noise),
                  oracle::secrecy(oracle::rate(sm), oracle::rate(se), oracle::rate(ss)));
        }
        const int n = in.L * (in.M + in.L);
        const oracle::Vec u = oracle::random_vec(n, rng);
        track(isac::echo_snr_lower_bound_es(d.ch, d.phi.reflect, d.k, support::to_eigen(u), s),
              oracle::echo_snr(g_s, in.K, u, s.slots, s.tau, s.noise));

        // time switching on the same instance with unit-modulus phases
        const ris::TsConfig ts = random_ts(in, rng);
        const double p1 = ts.pi1, p2 = 1.0 - ts.pi1;
        for (int m = 0; m < in.M; ++m) {
            auto mix = [&](const oracle::Vec& a, const oracle::Vec& b) {
                return p1 * oracle::rate(oracle::sinr(a, in.K, m, noise)) +
                       p2 * oracle::rate(oracle::sinr(b, in.K, m, noise));
            };
            const double lu = mix(oracle::direct_row(in.lu_d[m]), oracle::effective_row(in.lu_d[m], in.lu_r[m], in.phi_b, in.H));
            const double eve = mix(oracle::direct_row(in.eve_d), oracle::effective_row(in.eve_d, in.eve_r, in.phi_b, in.H));
            const double st = mix(oracle::direct_row(in.st_d), oracle::effective_row(in.st_d, in.st_r, in.phi_a, in.H));
            const isac::TsRates r = isac::ts_rates(m, d.ch, ts, d.k, noise);
            track(r.lu, lu);
            track(r.eve, eve);
            track(r.st, st);
            track(isac::secrecy_rate_ts(m, d.ch, ts, d.k, noise), oracle::secrecy(lu, eve, st));
        }
        const oracle::Vec u2 = oracle::random_vec(n, rng);
        const double echo_ts =
            p1 * oracle::echo_snr(oracle::direct_row(in.st_d), in.K, u, s.slots, s.tau, s.noise) +
            p2 * oracle::echo_snr(oracle::effective_row(in.st_d, in.st_r, in.phi_a, in.H), in.K, u2, s.slots, s.tau, s.noise);
        track(isac::echo_snr_ts(d.ch, ts, d.k, support::to_eigen(u), support::to_eigen(u2), s), echo_ts);
    }
    const double secs = seconds_since(t0);
    report(1, "physics oracle", err <= 1e-10 && secs < 10.0, fmt("max abs err %.3g, %.2f s", err, secs));
}

void coupling_invariants()
{
    Rng rng(202);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 12;
    double amp = 0.0, phase = 0.0, ts_sum = 0.0, ts_mod = 0.0;
    for (int t = 0; t < 10000; ++t) {
        VectorXd raw(3 * n);
        for (auto& x : raw) x = u(rng);
        const ris::EsConfig es = ris::project_raw_action_es(view(raw));
        for (int i = 0; i < n; ++i) {
            const double a = es.amplitude_a(i), b = es.amplitude_b(i);
            amp = std::max(amp, std::abs(a * a + b * b - 1.0));
            phase = std::max(phase, std::abs(std::cos(es.phase_a(i) - es.phase_b(i))));
        }
        VectorXd raw_ts(2 * n + 1);
        for (auto& x : raw_ts) x = u(rng);
        const ris::TsConfig ts = ris::project_raw_action_ts(view(raw_ts));
        ts_sum = std::max(ts_sum, std::abs(ts.pi1 + ts.pi2() - 1.0));
        const auto d = ris::ts_matrices(ts);
        for (int i = 0; i < n; ++i) {
            ts_mod = std::max({ts_mod, std::abs(std::abs(d.reflect(i)) - 1.0), std::abs(std::abs(d.transmit(i)) - 1.0)});
        }
    }
    // amplitudes come from cos/sin of one angle; 2 ulp is the floating-point reading of "exactly"
    const bool ok = amp <= 2.0 * DBL_EPSILON && phase <= 1e-12 && ts_sum == 0.0 && ts_mod <= 2.0 * DBL_EPSILON;
    report(2, "coupling invariants", ok,
           fmt("amp %.2g, |cos dphi| %.2g, |pi1+pi2-1| %.2g, unit-modulus %.2g", amp, phase, ts_sum, ts_mod));
}

void filter_optimality()
{
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> frac(0.05, 0.95);
    isac::SensingParams s;
    s.tau = 1.0;
    s.slots = 2;
    s.noise = 0.5;
    long violations = 0;
    double scale_err = 0.0;
    for (int t = 0; t < 100; ++t) {
        Draw d = random_draw(rng);
        const int n = d.in.L * (d.in.M + d.in.L);
        const VectorXcd u_star = isac::optimal_filter_es(d.ch, d.phi.reflect, d.k);
        const double best = isac::echo_snr_lower_bound_es(d.ch, d.phi.reflect, d.k, u_star, s);
        const ris::TsConfig ts = random_ts(d.in, rng);
        const isac::FilterPair pair = isac::optimal_filters_ts(d.ch, ts, d.k);
        const double best_ts = isac::echo_snr_ts(d.ch, ts, d.k, pair.direct, pair.cascaded, s);
        for (int i = 0; i < 1000; ++i) {
            const VectorXcd a = support::to_eigen(oracle::random_vec(n, rng));
            const VectorXcd b = support::to_eigen(oracle::random_vec(n, rng));
            if (isac::echo_snr_lower_bound_es(d.ch, d.phi.reflect, d.k, a, s) > best * (1.0 + 1e-12)) ++violations;
            if (isac::echo_snr_ts(d.ch, ts, d.k, a, b, s) > best_ts * (1.0 + 1e-12)) ++violations;
        }
        const VectorXcd u = support::to_eigen(oracle::random_vec(n, rng));
        const double base = isac::echo_snr_lower_bound_es(d.ch, d.phi.reflect, d.k, u, s);
        for (cd c : {cd(3.0, 0.0), cd(-0.2, 1.1), cd(250.0, -70.0)}) {
            const double v = isac::echo_snr_lower_bound_es(d.ch, d.phi.reflect, d.k, c * u, s);
            scale_err = std::max(scale_err, std::abs(v - base) / std::max(1.0, base));
        }
    }
    report(3, "filter optimality", violations == 0 && scale_err <= 1e-12,
           fmt("%ld violations in 2e5 comparisons, scaling err %.2g", violations, scale_err));
}

void jensen_bound()
{
    std::mt19937_64 rng(404);
    std::uniform_int_distribution<int> qpsk(0, 3);
    long violations = 0;
    double min_ratio = 1e300;
    for (int t = 0; t < 100; ++t) {
        const Draw d = random_draw(rng);
        const auto& in = d.in;
        const int P = 1 + t % 4;
        isac::SensingParams s;
        s.tau = 1.1;
        s.slots = P;
        s.noise = 0.8;
        const auto g = oracle::effective_row(in.st_d, in.st_r, in.phi_a, in.H);
        const oracle::Vec u = oracle::random_vec(in.L * (in.M + in.L), rng);
        double acc = 0.0;
        for (int i = 0; i < 1000; ++i) {
            oracle::Mat block(in.M + in.L, oracle::Vec(P));
            for (auto& row : block)
                for (auto& c : row) c = std::polar(1.0, kPi / 4.0 + kPi / 2.0 * qpsk(rng));
            acc += oracle::echo_power_block(g, in.K, block, u);
        }
        const double mc = s.tau * s.tau * (acc / 1000.0) / (P * s.noise * oracle::inner(u, u).real());
        const double bound = isac::echo_snr_lower_bound_es(d.ch, d.phi.reflect, d.k, support::to_eigen(u), s);
        if (mc < bound - 1e-9 * std::max(1.0, bound)) ++violations;
        if (bound > 0.0) min_ratio = std::min(min_ratio, mc / bound);
    }
    report(4, "Jensen bound", violations == 0, fmt("%ld violations, min MC/bound %.4f", violations, min_ratio));
}

void gradient_checks()
{
    const auto t0 = Clock::now();
    Rng rng(505);
    double worst = 0.0;
    std::map<std::string, double> by_loss;
    auto note = [&](const std::string& k, double v) {
        by_loss[k] = std::max(by_loss[k], v);
        worst = std::max(worst, v);
    };
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> u(-0.95, 0.95);
    auto batch = [&](int sd, int ad, int d) {
        rl::Batch b;
        b.states = MatrixXd::NullaryExpr(sd, d, [&] { return n(rng); });
        b.actions = MatrixXd::NullaryExpr(ad, d, [&] { return u(rng); });
        b.next_states = MatrixXd::NullaryExpr(sd, d, [&] { return n(rng); });
        b.rewards = VectorXd::NullaryExpr(d, [&] { return n(rng); });
        b.continues = VectorXd::Ones(d);
        return b;
    };
    for (int trial = 0; trial < 10; ++trial) {
        const int sd = 3 + trial % 4, ad = 1 + trial % 3;
        rl::DdpgOptions dopt;
        dopt.hidden = 8 + 2 * trial;
        rl::DdpgAgent ddpg(sd, ad, dopt, 1000 + trial);
        const rl::Batch b = batch(sd, ad, 6);
        rl::Gradients g;
        ddpg.actor_objective(b, &g);
        note("actor", gradcheck::check_parameters(ddpg.actor(), [&] { return ddpg.actor_objective(b, nullptr); }, g).max_rel);
        const VectorXd y = ddpg.target_value(b);
        ddpg.critic_loss(b, y, &g);
        note("critic", gradcheck::check_parameters(ddpg.critic(), [&] { return ddpg.critic_loss(b, y, nullptr); }, g).max_rel);

        rl::SacOptions sopt;
        sopt.hidden = 8 + 2 * trial;
        rl::SacAgent sac(sd, ad, sopt, 2000 + trial);
        sac.set_log_alpha(std::log(0.2));
        const MatrixXd xi = MatrixXd::NullaryExpr(ad, 6, [&] { return n(rng); });
        sac.policy_loss(b, xi, &g);
        note("policy", gradcheck::check_parameters(sac.policy(), [&] { return sac.policy_loss(b, xi, nullptr); }, g).max_rel);
        const VectorXd ys = sac.soft_q_target(b, xi);
        for (int i = 0; i < 2; ++i) {
            sac.critic_loss(i, b, ys, &g);
            note("critic", gradcheck::check_parameters(sac.critic(i), [&] { return sac.critic_loss(i, b, ys, nullptr); }, g).max_rel);
        }
        const VectorXd lp = sac.sample_policy(b.states, xi).log_probs;
        double la = sac.log_alpha();
        const double grad = sac.temperature_loss(lp).second;
        note("temperature", gradcheck::check_scalar(la, [&] {
                                sac.set_log_alpha(la);
                                return sac.temperature_loss(lp).first;
                            }, grad).max_rel);
    }
    const double secs = seconds_since(t0);
    report(5, "gradient correctness", worst < 1e-4 && secs < 60.0,
           fmt("max rel err actor %.2g critic %.2g policy %.2g temperature %.2g, %.1f s", by_loss["actor"],
               by_loss["critic"], by_loss["policy"], by_loss["temperature"], secs));
}

void reward_examples()
{
    using isac::RewardInputs;
    const double a = isac::reward(RewardInputs{0.5, {2.0, 2.0}, 9.0}, 1.0, 1.0);
    const double b = isac::reward(RewardInputs{1.5, {1.5, 2.0}, 3.0}, 1.0, 1.0);
    const double c = isac::reward(RewardInputs{1.5, {0.5, 2.0}, 3.0}, 1.0, 1.0);
    const double kappa = db_to_linear(1.0);
    // the sensing branch meets the threshold continuously; just above it, rates add on top of kappa
    const double at = isac::reward(RewardInputs{kappa, {2.0, 2.0}, 1.0}, 1.0, kappa);
    const double below = isac::reward(RewardInputs{std::nextafter(kappa, 0.0), {2.0, 2.0}, 1.0}, 1.0, kappa);
    const double above_zero = isac::reward(RewardInputs{std::nextafter(kappa, 9.0), {0.0, 0.0}, 0.0}, 1.0, kappa);
    const bool ok = a == 0.5 && b == 6.0 && c == 2.5 && at == kappa && std::abs(below - kappa) <= 1e-15 &&
                    above_zero == kappa;
    report(6, "reward function", ok, fmt("branches %.17g / %.17g / %.17g; at threshold %.6f", a, b, c, at));
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void determinism(const fs::path& out)
{
    exp::ScenarioConfig cfg;
    cfg.episodes = 4;
    cfg.seeds = {11, 12};
    cfg.warmup = static_cast<std::size_t>(cfg.batch_size); // updates active from the third episode
    bool ok = true;
    std::string detail;
    for (const auto algo : {exp::Algorithm::Sac, exp::Algorithm::Ddpg}) {
        cfg.algorithm = algo;
        const fs::path a = out / ("determinism_" + exp::to_string(algo) + "_a");
        const fs::path b = out / ("determinism_" + exp::to_string(algo) + "_b");
        exp::run_scenario(cfg, a, 1);
        exp::run_scenario(cfg, b, 1);
        for (const char* f : {"episodes.csv", "summary.csv", "config.echo"}) {
            const bool same = slurp(a / f) == slurp(b / f);
            ok = ok && same && !slurp(a / f).empty();
            if (!same) detail += exp::to_string(algo) + ":" + f + " differs ";
        }
    }
    report(12, "determinism", ok, detail.empty() ? "episodes.csv, summary.csv, config.echo identical (sac, ddpg)" : detail);
}

void runtime_ordering()
{
    exp::ScenarioConfig cfg;
    cfg.algorithm = exp::Algorithm::Ddpg;
    const auto ddpg = exp::measure_runtime(cfg, 1, 20, 5);
    cfg.algorithm = exp::Algorithm::Sac;
    const auto sac = exp::measure_runtime(cfg, 1, 20, 5);
    report(11, "runtime ordering", sac.mean_ms > ddpg.mean_ms,
           fmt("ms/episode sac %.1f (sd %.1f) vs ddpg %.1f (sd %.1f)", sac.mean_ms, sac.std_ms, ddpg.mean_ms, ddpg.std_ms));
}

struct Runs {
    std::map<std::string, exp::ScenarioResult> by_key;
    double longest_minutes = 0.0;

    const exp::ScenarioResult& at(const std::string& k) const { return by_key.at(k); }

    double mean_secrecy(const std::string& k) const
    {
        std::vector<double> xs;
        for (const auto& r : at(k).runs) xs.push_back(r.summary.mean_secrecy);
        return exp::aggregate(xs).mean;
    }
};

Runs train_all(const fs::path& out, int episodes)
{
    struct Job {
        std::string key;
        std::string setting; // "key=value" overrides
    };
    const std::vector<Job> jobs{
        {"sac", ""},
        {"ddpg", "train.algorithm=ddpg"},
        {"spliced", "system.baseline=spliced"},
        {"conventional", "system.baseline=conventional"},
        {"N8", "system.elements=8"},
        {"N24", "system.elements=24"},
        {"P30", "link.power_dbm=30"},
        {"P33", "link.power_dbm=33"},
        {"k4", "sensing.threshold_db=4"},
        {"k8", "sensing.threshold_db=8"},
        {"k12", "sensing.threshold_db=12"},
    };
    Runs runs;
    for (const auto& job : jobs) {
        exp::ScenarioConfig cfg;
        cfg.name = job.key;
        cfg.episodes = episodes;
        if (!job.setting.empty()) {
            const auto eq = job.setting.find('=');
            cfg.set(job.setting.substr(0, eq), job.setting.substr(eq + 1));
        }
        const auto t0 = Clock::now();
        auto res = exp::run_scenario(cfg, out / job.key, 1);
        const double minutes = seconds_since(t0) / 60.0 / static_cast<double>(cfg.seeds.size());
        runs.longest_minutes = std::max(runs.longest_minutes, minutes);
        std::printf("  trained %-13s %zu seeds, %.1f min/seed, secrecy", job.key.c_str(), res.runs.size(), minutes);
        for (const auto& r : res.runs) std::printf(" %.4f", r.summary.mean_secrecy);
        std::printf(", final-50 return");
        for (const auto& r : res.runs) std::printf(" %.3f", r.summary.final_return);
        std::printf("\n");
        std::fflush(stdout);
        runs.by_key.emplace(job.key, std::move(res));
    }
    return runs;
}

void learning_progress(const Runs& runs)
{
    std::string detail;
    bool ok = true;
    for (const char* k : {"sac", "ddpg"}) {
        int improved = 0;
        for (const auto& r : runs.at(k).runs) improved += r.summary.final_return > r.summary.first_return;
        ok = ok && improved >= 2;
        detail += fmt("%s %d/3 seeds; ", k, improved);
    }
    detail += fmt("longest run %.1f min", runs.longest_minutes);
    report(7, "learning progress", ok && runs.longest_minutes <= 30.0, detail);
}

void algorithm_ordering(const Runs& runs)
{
    const auto& sac = runs.at("sac").runs;
    const auto& ddpg = runs.at("ddpg").runs;
    int wins = 0;
    std::string detail;
    for (std::size_t i = 0; i < sac.size(); ++i) {
        wins += sac[i].summary.final_return >= ddpg[i].summary.final_return;
        detail += fmt("seed %llu %.3f vs %.3f; ", static_cast<unsigned long long>(sac[i].summary.seed),
                      sac[i].summary.final_return, ddpg[i].summary.final_return);
    }
    report(8, "algorithm ordering", wins >= 2, detail + fmt("SAC >= DDPG in %d/3", wins));
}

void architecture_ordering(const Runs& runs)
{
    const double star = runs.mean_secrecy("sac");
    const double spliced = runs.mean_secrecy("spliced");
    const double conv = runs.mean_secrecy("conventional");
    report(9, "architecture ordering", star >= spliced && spliced >= conv,
           fmt("secrecy star %.4f, spliced %.4f, conventional %.4f", star, spliced, conv));
}

// At most one adjacent pair may move against `direction`, and by no more than 5% relative.
bool monotone(const std::vector<double>& v, int direction, std::string& detail)
{
    int violations = 0;
    bool small = true;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double step = direction * (v[i + 1] - v[i]);
        if (step < 0.0) {
            ++violations;
            small = small && -step <= 0.05 * std::abs(v[i]);
        }
        detail += fmt(i ? " %.4f" : "%.4f", v[i]);
    }
    detail += fmt(" %.4f", v.back());
    return violations == 0 || (violations == 1 && small);
}

void monotone_trends(const Runs& runs)
{
    std::string dn = "N{8,12,24}: ", dp = "P0{30,33,36}: ", dk = "kappa{1,4,8,12}: ";
    const bool n = monotone({runs.mean_secrecy("N8"), runs.mean_secrecy("sac"), runs.mean_secrecy("N24")}, +1, dn);
    const bool p = monotone({runs.mean_secrecy("P30"), runs.mean_secrecy("P33"), runs.mean_secrecy("sac")}, +1, dp);
    const bool k = monotone({runs.mean_secrecy("sac"), runs.mean_secrecy("k4"), runs.mean_secrecy("k8"),
                             runs.mean_secrecy("k12")},
                            -1, dk);
    report(10, "monotone trends", n && p && k,
           dn + (n ? " ok; " : " broken; ") + dp + (p ? " ok; " : " broken; ") + dk + (k ? " ok" : " broken"));
}

} // namespace

int main(int argc, char** argv)
{
    tune_allocator();
    CLI::App app{"acceptance criteria 1-12"};
    std::string out = "acceptance_out";
    int episodes = 300;
    bool skip_training = false;
    app.add_option("--out", out, "directory for training outputs");
    app.add_option("--episodes", episodes, "episodes per training run")->check(CLI::PositiveNumber);
    app.add_flag("--skip-training", skip_training, "only the criteria that need no full training runs");
    CLI11_PARSE(app, argc, argv);

    const auto t0 = Clock::now();
    try {
        fs::create_directories(out);
        physics_oracle();
        coupling_invariants();
        filter_optimality();
        jensen_bound();
        gradient_checks();
        reward_examples();
        if (!skip_training) {
            const Runs runs = train_all(out, episodes);
            learning_progress(runs);
            algorithm_ordering(runs);
            architecture_ordering(runs);
            monotone_trends(runs);
        }
        runtime_ordering();
        determinism(out);
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%d criteria failed, %.1f min total\n", failures, seconds_since(t0) / 60.0);
    return failures == 0 ? 0 : 1;
}
