#include "starsec/isac_env.hpp"

#include <algorithm>

namespace starsec::isac {

namespace {

constexpr std::uint64_t kStreamTau = 900;

void append_complex(VectorXd& out, int& pos, const Eigen::Ref<const VectorXcd>& v, double scale)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out(pos++) = v(i).real() * scale;
        out(pos++) = v(i).imag() * scale;
    }
}

double inv_amplitude(double loss_db)
{
    return 1.0 / std::sqrt(db_to_linear(-loss_db));
}

double safe_echo(const RowVectorXcd& g, const TransmitDesign& k, const SensingParams& s)
{
    try {
        return echo_snr(g, k, optimal_filter(g, k), s);
    } catch (const DegenerateFilterError&) {
        return 0.0;
    }
}

} // namespace

int channel_feature_count(const channel::Dimensions& d)
{
    const int complex_entries = d.elements * d.antennas + d.users * (d.antennas + d.elements) +
                                2 * (d.antennas + d.elements);
    return 2 * complex_entries;
}

void EnvConfig::validate() const
{
    if (dims.antennas < 1 || dims.elements < 1 || dims.users < 1) {
        throw std::invalid_argument("L, N and M must be positive");
    }
    if (horizon < 1) {
        throw std::invalid_argument("horizon T must be positive");
    }
    if (!(power_budget > 0.0) || !(noise > 0.0) || !(sensing.noise > 0.0) || sensing.slots < 1) {
        throw std::invalid_argument("power, noise and sensing parameters must be positive");
    }
    if (architecture == Architecture::DoubleSpliced && dims.elements % 2 != 0) {
        throw std::invalid_argument("double-spliced surface needs an even element count");
    }
    if (architecture != Architecture::Star && protocol == Protocol::Ts) {
        throw std::invalid_argument("reflect-only baselines have no time-switching protocol");
    }
    if (static_cast<int>(geometry.lu_positions.size()) != dims.users) {
        throw std::invalid_argument("geometry LU count does not match M");
    }
    if (dims.elements % fading.elements_per_row != 0) {
        throw std::invalid_argument("elements per row must divide N");
    }
    geometry.validate();
}

IsacEnv::IsacEnv(EnvConfig cfg)
    : cfg_(std::move(cfg))
{
    cfg_.validate();
    losses_ = channel::link_losses(cfg_.geometry, cfg_.fading);
    action_dim_ = beam_action_dim() + surface_action_dim();
    state_dim_ = channel_feature_count(cfg_.dims) + action_dim_ + 2;
    prev_action_ = VectorXd::Zero(action_dim_);
}

int IsacEnv::beam_action_dim() const
{
    const auto& d = cfg_.dims;
    return 2 * d.antennas * (d.users + d.antennas);
}

int IsacEnv::surface_action_dim() const
{
    const int n = cfg_.dims.elements;
    switch (cfg_.architecture) {
    case Architecture::Star:
        return cfg_.protocol == Protocol::Es ? 3 * n : 2 * n + 1;
    case Architecture::DoubleSpliced:
    case Architecture::Conventional:
        return n;
    }
    return 0;
}

const channel::ChannelRealization& IsacEnv::current_channel() const
{
    if (!active_ || done()) {
        throw EpisodeStateError("no active slot");
    }
    return episode_[slot_];
}

VectorXd IsacEnv::reset(std::uint64_t episode_seed)
{
    episode_ = channel::generate_episode_channels(cfg_.geometry, cfg_.fading, cfg_.dims, cfg_.horizon, episode_seed);
    tau_rng_ = make_stream(episode_seed, kStreamTau);
    tau_ = cfg_.sensing.tau;
    slot_ = 0;
    active_ = true;
    prev_action_.setZero();
    prev_reward_ = 0.0;
    return build_state(episode_[0]);
}

TransmitDesign IsacEnv::decode_beamformers(std::span<const double> action) const
{
    const int L = cfg_.dims.antennas;
    const int M = cfg_.dims.users;
    const int cols = M + L;
    const int entries = L * cols;
    const double amp = std::sqrt(cfg_.power_budget / entries);
    MatrixXcd k(L, cols);
    for (int j = 0; j < cols; ++j) {
        for (int l = 0; l < L; ++l) {
            const int idx = j * L + l;
            k(l, j) = amp * cd(std::clamp(action[idx], -1.0, 1.0), std::clamp(action[entries + idx], -1.0, 1.0));
        }
    }
    TransmitDesign raw{k.leftCols(M), k.rightCols(L)};
    return project_power(raw, cfg_.power_budget);
}

ris::CoefficientDiagonals IsacEnv::decode_surface_es(std::span<const double> action) const
{
    const auto block = action.subspan(beam_action_dim(), surface_action_dim());
    const int n = cfg_.dims.elements;
    switch (cfg_.architecture) {
    case Architecture::Star:
        return ris::es_matrices(ris::project_raw_action_es(block));
    case Architecture::DoubleSpliced: {
        // first half reflects, second half transmits; no amplitude or phase coupling
        ris::CoefficientDiagonals d{VectorXcd::Zero(n), VectorXcd::Zero(n)};
        for (int i = 0; i < n; ++i) {
            const cd unit = std::polar(1.0, std::clamp(block[i], -1.0, 1.0) * kPi);
            (i < n / 2 ? d.reflect : d.transmit)(i) = unit;
        }
        return d;
    }
    case Architecture::Conventional: {
        ris::CoefficientDiagonals d{VectorXcd::Zero(n), VectorXcd::Zero(n)};
        for (int i = 0; i < n; ++i) {
            d.reflect(i) = std::polar(1.0, std::clamp(block[i], -1.0, 1.0) * kPi);
        }
        return d;
    }
    }
    throw std::logic_error("unknown architecture");
}

ris::TsConfig IsacEnv::decode_surface_ts(std::span<const double> action) const
{
    return ris::project_raw_action_ts(action.subspan(beam_action_dim(), surface_action_dim()));
}

SlotEvaluation IsacEnv::evaluate(const channel::ChannelRealization& ch, std::span<const double> action,
                                 double tau) const
{
    if (static_cast<int>(action.size()) != action_dim_) {
        throw std::invalid_argument("action has wrong dimension");
    }
    const TransmitDesign k = decode_beamformers(action);
    SensingParams sensing = cfg_.sensing;
    sensing.tau = tau;
    const int M = cfg_.dims.users;

    SlotEvaluation ev;
    ev.lu_rates.resize(M);
    ev.eve_rates.resize(M);
    ev.st_rates.resize(M);

    if (cfg_.protocol == Protocol::Es) {
        const ris::CoefficientDiagonals phi = decode_surface_es(action);
        const RowVectorXcd eve = effective_channel(ch.eve_direct, ch.eve_ris, phi.transmit, ch.bs_ris);
        const RowVectorXcd st = effective_channel(ch.st_direct, ch.st_ris, phi.reflect, ch.bs_ris);
        for (int m = 0; m < M; ++m) {
            const RowVectorXcd lu = effective_channel(ch.lu_direct[m], ch.lu_ris[m], phi.transmit, ch.bs_ris);
            ev.lu_rates[m] = rate(stream_sinr(lu, k, m, cfg_.noise));
            ev.eve_rates[m] = rate(stream_sinr(eve, k, m, cfg_.noise));
            ev.st_rates[m] = rate(stream_sinr(st, k, m, cfg_.noise));
        }
        ev.echo_snr = safe_echo(st, k, sensing);
    } else {
        const ris::TsConfig ts = decode_surface_ts(action);
        for (int m = 0; m < M; ++m) {
            const TsRates r = ts_rates(m, ch, ts, k, cfg_.noise);
            ev.lu_rates[m] = r.lu;
            ev.eve_rates[m] = r.eve;
            ev.st_rates[m] = r.st;
        }
        const ris::CoefficientDiagonals phi = ris::ts_matrices(ts);
        ev.echo_snr = ts.pi1 * safe_echo(direct_channel(ch.st_direct), k, sensing) +
                      ts.pi2() * safe_echo(effective_channel(ch.st_direct, ch.st_ris, phi.reflect, ch.bs_ris), k,
                                           sensing);
    }
    for (int m = 0; m < M; ++m) {
        ev.sum_secrecy += secrecy(ev.lu_rates[m], ev.eve_rates[m], ev.st_rates[m]);
    }
    return ev;
}

StepOutcome IsacEnv::step(std::span<const double> action)
{
    if (!active_ || done()) {
        throw EpisodeStateError("step called outside an active episode");
    }
    if (cfg_.redraw_tau) {
        tau_ = cfg_.sensing.tau * std::abs(complex_normal(tau_rng_));
    }
    const SlotEvaluation ev = evaluate(episode_[slot_], action, tau_);

    StepOutcome out;
    out.lu_rates = ev.lu_rates;
    out.eve_rates = ev.eve_rates;
    out.st_rates = ev.st_rates;
    out.sum_secrecy = ev.sum_secrecy;
    out.echo_snr = ev.echo_snr;
    out.reward = reward(RewardInputs{ev.echo_snr, ev.lu_rates, ev.sum_secrecy}, cfg_.rate_floor,
                        cfg_.sensing.threshold);
    out.power_ok = decode_beamformers(action).power() <= cfg_.power_budget;
    out.rates_ok = std::all_of(ev.lu_rates.begin(), ev.lu_rates.end(),
                               [&](double r) { return r >= cfg_.rate_floor; });
    out.echo_ok = ev.echo_snr >= cfg_.sensing.threshold;

    prev_action_ = Eigen::Map<const VectorXd>(action.data(), action_dim_);
    prev_reward_ = out.reward;
    ++slot_;
    out.terminal = done();
    out.next_state = build_state(episode_[std::min(slot_, cfg_.horizon - 1)]);
    if (out.terminal) {
        active_ = false;
    }
    return out;
}

VectorXd IsacEnv::build_state(const channel::ChannelRealization& ch) const
{
    VectorXd s(state_dim_);
    int pos = 0;
    const MatrixXcd& h = ch.bs_ris;
    append_complex(s, pos, Eigen::Map<const VectorXcd>(h.data(), h.size()), inv_amplitude(losses_.bs_ris));
    for (int m = 0; m < cfg_.dims.users; ++m) {
        append_complex(s, pos, ch.lu_direct[m], inv_amplitude(losses_.lu_direct[m]));
        append_complex(s, pos, ch.lu_ris[m], inv_amplitude(losses_.lu_ris[m]));
    }
    append_complex(s, pos, ch.eve_direct, inv_amplitude(losses_.eve_direct));
    append_complex(s, pos, ch.eve_ris, inv_amplitude(losses_.eve_ris));
    append_complex(s, pos, ch.st_direct, inv_amplitude(losses_.st_direct));
    append_complex(s, pos, ch.st_ris, inv_amplitude(losses_.st_ris));
    s.segment(pos, action_dim_) = prev_action_;
    pos += action_dim_;
    s(pos++) = prev_reward_;
    s(pos++) = static_cast<double>(slot_) / cfg_.horizon;
    return s;
}

} // namespace starsec::isac
