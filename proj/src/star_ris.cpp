#include "starsec/star_ris.hpp"

#include <algorithm>
#include <stdexcept>

namespace starsec::ris {

double wrap_symmetric(double angle)
{
    double w = std::remainder(angle, 2.0 * kPi); // [-pi, pi]
    if (w <= -kPi) {
        w += 2.0 * kPi;
    }
    return w;
}

double wrap_positive(double angle)
{
    double w = std::fmod(angle, 2.0 * kPi);
    if (w < 0.0) {
        w += 2.0 * kPi;
    }
    if (w >= 2.0 * kPi) {
        w = 0.0;
    }
    return w;
}

double EsConfig::phase_a(int n) const
{
    return wrap_symmetric(phase_b(n) + sign(n) * 0.5 * kPi);
}

CoefficientDiagonals es_matrices(const EsConfig& cfg)
{
    const int n_el = cfg.elements();
    CoefficientDiagonals d{VectorXcd(n_el), VectorXcd(n_el)};
    for (int n = 0; n < n_el; ++n) {
        d.reflect(n) = std::polar(cfg.amplitude_a(n), cfg.phase_a(n));
        d.transmit(n) = std::polar(cfg.amplitude_b(n), cfg.phase_b(n));
    }
    return d;
}

CoefficientDiagonals ts_matrices(const TsConfig& cfg)
{
    const int n_el = cfg.elements();
    CoefficientDiagonals d{VectorXcd(n_el), VectorXcd(n_el)};
    for (int n = 0; n < n_el; ++n) {
        d.reflect(n) = std::polar(1.0, cfg.phase_a(n));
        d.transmit(n) = std::polar(1.0, cfg.phase_b(n));
    }
    return d;
}

EsConfig project_raw_action_es(std::span<const double> raw)
{
    if (raw.size() % 3 != 0 || raw.empty()) {
        throw std::domain_error("ES action block must have length 3N");
    }
    const int n_el = static_cast<int>(raw.size() / 3);
    EsConfig cfg{VectorXd(n_el), VectorXd(n_el), VectorXd(n_el)};
    for (int n = 0; n < n_el; ++n) {
        const double t = std::clamp(raw[n], -1.0, 1.0);
        const double p = std::clamp(raw[n_el + n], -1.0, 1.0);
        cfg.theta(n) = (t + 1.0) * 0.25 * kPi;
        cfg.phase_b(n) = wrap_symmetric(p * kPi);
        cfg.sign(n) = raw[2 * n_el + n] >= 0.0 ? 1.0 : -1.0;
    }
    return cfg;
}

TsConfig project_raw_action_ts(std::span<const double> raw)
{
    if (raw.size() < 3 || (raw.size() - 1) % 2 != 0) {
        throw std::domain_error("TS action block must have length 2N+1");
    }
    const int n_el = static_cast<int>((raw.size() - 1) / 2);
    TsConfig cfg;
    cfg.pi1 = 0.5 * (std::clamp(raw[0], -1.0, 1.0) + 1.0);
    cfg.phase_a.resize(n_el);
    cfg.phase_b.resize(n_el);
    for (int n = 0; n < n_el; ++n) {
        cfg.phase_a(n) = wrap_positive((std::clamp(raw[1 + n], -1.0, 1.0) + 1.0) * kPi);
        cfg.phase_b(n) = wrap_positive((std::clamp(raw[1 + n_el + n], -1.0, 1.0) + 1.0) * kPi);
    }
    return cfg;
}

VectorXd ts_config_to_raw(const TsConfig& cfg)
{
    const int n_el = cfg.elements();
    VectorXd raw(2 * n_el + 1);
    raw(0) = 2.0 * cfg.pi1 - 1.0;
    for (int n = 0; n < n_el; ++n) {
        raw(1 + n) = cfg.phase_a(n) / kPi - 1.0;
        raw(1 + n_el + n) = cfg.phase_b(n) / kPi - 1.0;
    }
    return raw;
}

} // namespace starsec::ris
