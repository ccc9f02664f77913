#pragma once

#include "starsec/types.hpp"

#include <span>

namespace starsec::ris {

// Energy-splitting configuration. Amplitudes and reflection phases are derived, so the
// amplitude coupling (cos^2 + sin^2 = 1) and the quadrature phase coupling hold for every value.
struct EsConfig {
    VectorXd theta;   // [0, pi/2]
    VectorXd phase_b; // transmission phases, (-pi, pi]
    VectorXd sign;    // +1 / -1

    int elements() const { return static_cast<int>(theta.size()); }
    double amplitude_a(int n) const { return std::cos(theta(n)); }
    double amplitude_b(int n) const { return std::sin(theta(n)); }
    double phase_a(int n) const;
};

// Time-switching configuration: reflect for a fraction pi1 of the slot, transmit for the rest.
struct TsConfig {
    double pi1 = 0.5;
    VectorXd phase_a; // [0, 2pi)
    VectorXd phase_b; // [0, 2pi)

    double pi2() const { return 1.0 - pi1; }
    int elements() const { return static_cast<int>(phase_a.size()); }
};

// Diagonals of the reflection (A) and transmission (B) coefficient matrices.
struct CoefficientDiagonals {
    VectorXcd reflect;
    VectorXcd transmit;
};

double wrap_symmetric(double angle); // (-pi, pi]
double wrap_positive(double angle);  // [0, 2pi)

CoefficientDiagonals es_matrices(const EsConfig& cfg);
CoefficientDiagonals ts_matrices(const TsConfig& cfg);

// raw in [-1,1]^{3N}: [theta block | phase block | sign block]
EsConfig project_raw_action_es(std::span<const double> raw);
// raw in [-1,1]^{2N+1}: [pi1 | phase_a block | phase_b block]
TsConfig project_raw_action_ts(std::span<const double> raw);

// Inverse of project_raw_action_ts on the open cube.
VectorXd ts_config_to_raw(const TsConfig& cfg);

} // namespace starsec::ris
