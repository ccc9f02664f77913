#include "starsec/isac.hpp"

#include <algorithm>
#include <numeric>

namespace starsec::isac {

namespace {

void require_noise(double noise)
{
    if (!(noise > 0.0)) {
        throw std::domain_error("noise variance must be positive");
    }
}

} // namespace

MatrixXcd TransmitDesign::stacked() const
{
    MatrixXcd k(comm.rows(), comm.cols() + radar.cols());
    k << comm, radar;
    return k;
}

RowVectorXcd effective_channel(const VectorXcd& direct, const VectorXcd& ris, const VectorXcd& phi,
                               const MatrixXcd& bs_ris)
{
    // ris^H diag(phi) H == (conj(ris) .* phi)^T H
    const VectorXcd weighted = ris.conjugate().cwiseProduct(phi);
    return weighted.transpose() * bs_ris + direct.adjoint();
}

RowVectorXcd direct_channel(const VectorXcd& direct)
{
    return direct.adjoint();
}

double stream_sinr(const RowVectorXcd& row, const TransmitDesign& k, int m, double noise)
{
    require_noise(noise);
    if (m < 0 || m >= k.users()) {
        throw std::out_of_range("stream index out of range");
    }
    const Eigen::RowVectorXcd comm = row * k.comm;
    const Eigen::RowVectorXcd radar = row * k.radar;
    const double signal = std::norm(comm(m));
    const double interference = comm.squaredNorm() - signal + radar.squaredNorm();
    return signal / (interference + noise);
}

double rate(double sinr)
{
    return std::log2(1.0 + sinr);
}

double lu_sinr_es(int m, const ChannelRealization& ch, const VectorXcd& phi_b, const TransmitDesign& k,
                  double noise)
{
    return stream_sinr(effective_channel(ch.lu_direct.at(m), ch.lu_ris.at(m), phi_b, ch.bs_ris), k, m, noise);
}

double eve_sinr_es(int m, const ChannelRealization& ch, const VectorXcd& phi_b, const TransmitDesign& k,
                   double noise)
{
    return stream_sinr(effective_channel(ch.eve_direct, ch.eve_ris, phi_b, ch.bs_ris), k, m, noise);
}

double st_sinr_es(int m, const ChannelRealization& ch, const VectorXcd& phi_a, const TransmitDesign& k,
                  double noise)
{
    return stream_sinr(effective_channel(ch.st_direct, ch.st_ris, phi_a, ch.bs_ris), k, m, noise);
}

double secrecy(double r_lu, double r_eve, double r_st)
{
    return std::max(0.0, r_lu - r_eve) + std::max(0.0, r_lu - r_st);
}

double secrecy_rate_es(int m, const ChannelRealization& ch, const ris::CoefficientDiagonals& phi,
                       const TransmitDesign& k, double noise)
{
    return secrecy(rate(lu_sinr_es(m, ch, phi.transmit, k, noise)), rate(eve_sinr_es(m, ch, phi.transmit, k, noise)),
                   rate(st_sinr_es(m, ch, phi.reflect, k, noise)));
}

VectorXcd sensing_image(const RowVectorXcd& g_row, const TransmitDesign& k)
{
    const VectorXcd g = g_row.adjoint();
    const MatrixXcd K = k.stacked();
    // (g g^H) K, column-stacked
    const MatrixXcd img = g * (g_row * K);
    return Eigen::Map<const VectorXcd>(img.data(), img.size());
}

double echo_snr(const RowVectorXcd& g_row, const TransmitDesign& k, const VectorXcd& u, const SensingParams& s)
{
    const double uu = u.squaredNorm();
    if (!(uu > 0.0)) {
        throw std::domain_error("receive filter must be nonzero");
    }
    const VectorXcd v = sensing_image(g_row, k);
    if (v.size() != u.size()) {
        throw std::invalid_argument("receive filter length must be L(M+L)");
    }
    const double num = s.slots * s.tau * s.tau * std::norm(u.dot(v));
    return num / (s.noise * uu);
}

double echo_snr_lower_bound_es(const ChannelRealization& ch, const VectorXcd& phi_a, const TransmitDesign& k,
                               const VectorXcd& u, const SensingParams& s)
{
    return echo_snr(effective_channel(ch.st_direct, ch.st_ris, phi_a, ch.bs_ris), k, u, s);
}

VectorXcd optimal_filter(const RowVectorXcd& g_row, const TransmitDesign& k)
{
    const VectorXcd v = sensing_image(g_row, k);
    // k^H (I kron H_s^H H_s) k == ||v||^2
    const double denom = v.squaredNorm();
    if (!(denom > 0.0) || !std::isfinite(denom)) {
        throw DegenerateFilterError("beamformers are orthogonal to the sensing channel");
    }
    return v / denom;
}

VectorXcd optimal_filter_es(const ChannelRealization& ch, const VectorXcd& phi_a, const TransmitDesign& k)
{
    return optimal_filter(effective_channel(ch.st_direct, ch.st_ris, phi_a, ch.bs_ris), k);
}

TsRates ts_rates(int m, const ChannelRealization& ch, const ris::TsConfig& cfg, const TransmitDesign& k,
                 double noise)
{
    const ris::CoefficientDiagonals phi = ris::ts_matrices(cfg);
    const double p1 = cfg.pi1;
    const double p2 = cfg.pi2();
    auto mix = [&](const RowVectorXcd& a, const RowVectorXcd& b) {
        return p1 * rate(stream_sinr(a, k, m, noise)) + p2 * rate(stream_sinr(b, k, m, noise));
    };
    TsRates r;
    r.lu = mix(direct_channel(ch.lu_direct.at(m)),
               effective_channel(ch.lu_direct.at(m), ch.lu_ris.at(m), phi.transmit, ch.bs_ris));
    r.eve = mix(direct_channel(ch.eve_direct), effective_channel(ch.eve_direct, ch.eve_ris, phi.transmit, ch.bs_ris));
    r.st = mix(direct_channel(ch.st_direct), effective_channel(ch.st_direct, ch.st_ris, phi.reflect, ch.bs_ris));
    return r;
}

double secrecy_rate_ts(int m, const ChannelRealization& ch, const ris::TsConfig& cfg, const TransmitDesign& k,
                       double noise)
{
    const TsRates r = ts_rates(m, ch, cfg, k, noise);
    return secrecy(r.lu, r.eve, r.st);
}

double echo_snr_ts(const ChannelRealization& ch, const ris::TsConfig& cfg, const TransmitDesign& k,
                   const VectorXcd& u1, const VectorXcd& u2, const SensingParams& s)
{
    const ris::CoefficientDiagonals phi = ris::ts_matrices(cfg);
    const RowVectorXcd g1 = direct_channel(ch.st_direct);
    const RowVectorXcd g2 = effective_channel(ch.st_direct, ch.st_ris, phi.reflect, ch.bs_ris);
    return cfg.pi1 * echo_snr(g1, k, u1, s) + cfg.pi2() * echo_snr(g2, k, u2, s);
}

FilterPair optimal_filters_ts(const ChannelRealization& ch, const ris::TsConfig& cfg, const TransmitDesign& k)
{
    const ris::CoefficientDiagonals phi = ris::ts_matrices(cfg);
    FilterPair f;
    f.direct = optimal_filter(direct_channel(ch.st_direct), k);
    f.cascaded = optimal_filter(effective_channel(ch.st_direct, ch.st_ris, phi.reflect, ch.bs_ris), k);
    return f;
}

TransmitDesign project_power(const TransmitDesign& raw, double budget)
{
    if (!(budget > 0.0)) {
        throw std::domain_error("power budget must be positive");
    }
    const double p = raw.power();
    if (p <= budget) {
        return raw;
    }
    double scale = std::sqrt(budget / p);
    TransmitDesign out{raw.comm * scale, raw.radar * scale};
    // rounding can leave the scaled power one ulp above the budget
    while (out.power() > budget) {
        scale = std::nextafter(scale, 0.0);
        out = TransmitDesign{raw.comm * scale, raw.radar * scale};
    }
    return out;
}

double reward(const RewardInputs& in, double rate_floor, double threshold)
{
    if (in.echo_snr <= threshold) {
        return in.echo_snr;
    }
    const bool all_met = std::all_of(in.lu_rates.begin(), in.lu_rates.end(),
                                     [&](double r) { return r >= rate_floor; });
    const double m = static_cast<double>(in.lu_rates.size());
    if (all_met) {
        return threshold + m * rate_floor + in.sum_secrecy;
    }
    double capped = 0.0;
    for (double r : in.lu_rates) {
        capped += std::min(r, rate_floor);
    }
    return threshold + capped;
}

} // namespace starsec::isac
