#pragma once

#include "starsec/channel.hpp"
#include "starsec/star_ris.hpp"
#include "starsec/types.hpp"

#include <span>
#include <stdexcept>
#include <vector>

namespace starsec::isac {

using channel::ChannelRealization;

// K = [K_s K_w]: column m < M serves LU m, the remaining L columns are radar beams.
struct TransmitDesign {
    MatrixXcd comm;  // L x M
    MatrixXcd radar; // L x L

    MatrixXcd stacked() const;
    double power() const { return comm.squaredNorm() + radar.squaredNorm(); }
    int antennas() const { return static_cast<int>(comm.rows()); }
    int users() const { return static_cast<int>(comm.cols()); }
};

struct SensingParams {
    double tau = 1.0;      // compound target amplitude
    int slots = 1;         // P, matched-filter length
    double noise = 1.0;    // sigma_s^2
    double threshold = 1.0; // kappa_t, linear
};

class DegenerateFilterError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Effective row h^H = ris^H diag(phi) H + direct^H.
RowVectorXcd effective_channel(const VectorXcd& direct, const VectorXcd& ris, const VectorXcd& phi,
                               const MatrixXcd& bs_ris);
RowVectorXcd direct_channel(const VectorXcd& direct);

// Generic SINR of stream m seen through `row`.
double stream_sinr(const RowVectorXcd& row, const TransmitDesign& k, int m, double noise);

double rate(double sinr); // log2(1 + sinr)

double lu_sinr_es(int m, const ChannelRealization& ch, const VectorXcd& phi_b, const TransmitDesign& k,
                  double noise);
double eve_sinr_es(int m, const ChannelRealization& ch, const VectorXcd& phi_b, const TransmitDesign& k,
                   double noise);
double st_sinr_es(int m, const ChannelRealization& ch, const VectorXcd& phi_a, const TransmitDesign& k,
                  double noise);

double secrecy(double r_lu, double r_eve, double r_st);

double secrecy_rate_es(int m, const ChannelRealization& ch, const ris::CoefficientDiagonals& phi,
                       const TransmitDesign& k, double noise);

// vec((g g^H) K): the matched-filter image of the beamformers, length L(M+L).
VectorXcd sensing_image(const RowVectorXcd& g_row, const TransmitDesign& k);

// P tau^2 |u^H v|^2 / (sigma_s^2 u^H u) for the sensing row g^H.
double echo_snr(const RowVectorXcd& g_row, const TransmitDesign& k, const VectorXcd& u, const SensingParams& s);
double echo_snr_lower_bound_es(const ChannelRealization& ch, const VectorXcd& phi_a, const TransmitDesign& k,
                               const VectorXcd& u, const SensingParams& s);

// Rayleigh-quotient maximizer v / ||v||^2; throws DegenerateFilterError when v = 0.
VectorXcd optimal_filter(const RowVectorXcd& g_row, const TransmitDesign& k);
VectorXcd optimal_filter_es(const ChannelRealization& ch, const VectorXcd& phi_a, const TransmitDesign& k);

struct TsRates {
    double lu = 0.0;
    double eve = 0.0;
    double st = 0.0;
};

// Period A uses the direct rows only; period B uses the cascaded rows
// (Phi_B for LU and Eve, Phi_A for the ST), weighted by pi1 / pi2.
TsRates ts_rates(int m, const ChannelRealization& ch, const ris::TsConfig& cfg, const TransmitDesign& k,
                 double noise);
double secrecy_rate_ts(int m, const ChannelRealization& ch, const ris::TsConfig& cfg, const TransmitDesign& k,
                       double noise);

struct FilterPair {
    VectorXcd direct;   // u1
    VectorXcd cascaded; // u2
};

double echo_snr_ts(const ChannelRealization& ch, const ris::TsConfig& cfg, const TransmitDesign& k,
                   const VectorXcd& u1, const VectorXcd& u2, const SensingParams& s);
FilterPair optimal_filters_ts(const ChannelRealization& ch, const ris::TsConfig& cfg, const TransmitDesign& k);

// Scales K onto the total-power budget when it is exceeded.
TransmitDesign project_power(const TransmitDesign& raw, double budget);

struct RewardInputs {
    double echo_snr = 0.0;
    std::vector<double> lu_rates;
    double sum_secrecy = 0.0;
};

double reward(const RewardInputs& in, double rate_floor, double threshold);

} // namespace starsec::isac
