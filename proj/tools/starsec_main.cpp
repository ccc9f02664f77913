#include "starsec/experiments.hpp"
#include "starsec/runtime.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace starsec;

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct Common {
    std::string config;
    std::string algo;
    std::string protocol;
    std::string baseline;
    std::string seeds;
    std::string out = "out";
    int episodes = 0;
    int jobs = 0;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("--config", c.config, "scenario config file (key = value lines)");
    cmd->add_option("--algo", c.algo, "ddpg or sac")->check(CLI::IsMember({"ddpg", "sac"}));
    cmd->add_option("--protocol", c.protocol, "es or ts")->check(CLI::IsMember({"es", "ts"}));
    cmd->add_option("--baseline", c.baseline, "surface variant")
        ->check(CLI::IsMember({"star", "spliced", "conventional"}));
    cmd->add_option("--seeds", c.seeds, "comma-separated seeds");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--episodes", c.episodes, "override train.episodes")->check(CLI::PositiveNumber);
    cmd->add_option("--jobs", c.jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
}

exp::ScenarioConfig resolve(const Common& c)
{
    exp::ScenarioConfig cfg = c.config.empty() ? exp::ScenarioConfig{} : exp::load_config(c.config);
    if (!c.algo.empty()) cfg.set("train.algorithm", c.algo);
    if (!c.protocol.empty()) cfg.set("system.protocol", c.protocol);
    if (!c.baseline.empty()) cfg.set("system.baseline", c.baseline);
    if (!c.seeds.empty()) cfg.set("train.seeds", c.seeds);
    if (c.episodes > 0) cfg.set("train.episodes", std::to_string(c.episodes));
    cfg.validate();
    return cfg;
}

void print_summary(const exp::ScenarioResult& res)
{
    std::vector<double> final_return;
    std::vector<double> secrecy;
    for (const auto& run : res.runs) {
        final_return.push_back(run.summary.final_return);
        secrecy.push_back(run.summary.mean_secrecy);
    }
    const auto r = exp::aggregate(final_return);
    const auto s = exp::aggregate(secrecy);
    std::printf("%s=%s  final-50 return %.4f +- %.4f  secrecy %.4f +- %.4f bps/Hz\n", res.axis.c_str(),
                res.value.c_str(), r.mean, r.std, s.mean, s.std);
}

} // namespace

int main(int argc, char** argv)
{
    tune_allocator();
    CLI::App app{"STAR-RIS secure ISAC simulator and DDPG/SAC trainer"};
    app.require_subcommand(1);

    Common run_opts;
    auto* run = app.add_subcommand("run", "train one scenario over all seeds");
    add_common(run, run_opts);

    Common sweep_opts;
    std::string axis;
    std::string values;
    auto* sw = app.add_subcommand("sweep", "train one scenario per axis value and seed");
    add_common(sw, sweep_opts);
    sw->add_option("--axis", axis, "lr, N, P0, kappa, algorithm, protocol or baseline")->required();
    sw->add_option("--values", values, "comma-separated axis values")->required();

    Common bench_opts;
    int timed = 20;
    int warmup = 5;
    auto* bench = app.add_subcommand("bench", "mean wall time per training episode");
    add_common(bench, bench_opts);
    bench->add_option("--timed", timed, "timed episodes per seed")->check(CLI::PositiveNumber);
    bench->add_option("--warmup", warmup, "discarded leading episodes")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*run) {
            const auto cfg = resolve(run_opts);
            const auto res = exp::run_scenario(cfg, run_opts.out, run_opts.jobs);
            print_summary(res);
        } else if (*sw) {
            const auto cfg = resolve(sweep_opts);
            std::vector<std::string> list;
            std::string item;
            std::istringstream in(values);
            while (std::getline(in, item, ',')) {
                if (!item.empty()) list.push_back(item);
            }
            for (const auto& res : exp::sweep(cfg, axis, list, sweep_opts.out, sweep_opts.jobs)) print_summary(res);
        } else if (*bench) {
            const auto base = resolve(bench_opts);
            std::vector<exp::Algorithm> algos;
            if (bench_opts.algo.empty()) {
                algos = {exp::Algorithm::Ddpg, exp::Algorithm::Sac};
            } else {
                algos = {base.algorithm};
            }
            std::filesystem::create_directories(bench_opts.out);
            const auto path = std::filesystem::path(bench_opts.out) / "runtime.csv";
            std::ofstream csv(path);
            if (!csv) throw std::runtime_error("cannot open " + path.string() + " for writing");
            csv << "scenario,algorithm,seed,timed_episodes,mean_ms,std_ms\n";
            for (const auto a : algos) {
                auto cfg = base;
                cfg.algorithm = a;
                for (const auto seed : cfg.seeds) {
                    const auto st = exp::measure_runtime(cfg, seed, timed, warmup);
                    csv << cfg.name << ',' << exp::to_string(a) << ',' << seed << ',' << st.timed_episodes << ','
                        << exp::format_double(st.mean_ms) << ',' << exp::format_double(st.std_ms) << '\n';
                    std::printf("%s seed %llu: %.2f ms/episode (std %.2f)\n", exp::to_string(a).c_str(),
                                static_cast<unsigned long long>(seed), st.mean_ms, st.std_ms);
                }
            }
            if (!csv.flush()) throw std::runtime_error("failed writing " + path.string());
        }
    } catch (const exp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kOk;
}
