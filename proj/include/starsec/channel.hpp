#pragma once

#include "starsec/types.hpp"

#include <cstdint>
#include <vector>

namespace starsec::channel {

// Side of the STAR-RIS plane: A is the reflection half-space (same side as the BS),
// B is the transmission half-space.
enum class Side { A, B };

struct SystemGeometry {
    Vector3d bs_position{0.0, 0.0, 5.0};
    Vector3d ris_position{150.0, 150.0, 15.0};
    std::vector<Vector3d> lu_positions;
    Vector3d eve_position{0.0, 0.0, 0.0};
    Vector3d st_position{0.0, 0.0, 0.0};
    // Unit normal of the RIS plane, pointing into side A.
    Vector3d ris_normal{-std::sqrt(0.5), -std::sqrt(0.5), 0.0};
    // Axis of the BS uniform linear array.
    Vector3d bs_array_axis{1.0, 0.0, 0.0};

    Side side_of(const Vector3d& p) const;

    // Throws std::invalid_argument when a distance is zero or the
    // ST / LU / Eve placement does not respect the A/B split.
    void validate() const;

    static SystemGeometry desk_default(int num_lus);
};

struct FadingParams {
    double rician_factor = 2.0; // linear
    double carrier_ghz = 2.0;
    double element_spacing = 0.0; // d_r, meters; 0 means half wavelength
    double antenna_spacing = 0.0; // d_0, meters; 0 means half wavelength
    int elements_per_row = 4;     // N_x
    double receiver_height = 1.5; // z_r, meters

    double wavelength() const { return kSpeedOfLight / (carrier_ghz * 1e9); }
    double ris_spacing() const { return element_spacing > 0.0 ? element_spacing : 0.5 * wavelength(); }
    double bs_spacing() const { return antenna_spacing > 0.0 ? antenna_spacing : 0.5 * wavelength(); }

    static FadingParams from_db(double rician_db, double carrier_ghz, int elements_per_row);
};

struct Dimensions {
    int antennas = 4;  // L
    int elements = 12; // N
    int users = 2;     // M
};

// All channel coefficients of one slot. Vectors follow the h^H convention:
// the effective LU row is lu_ris[m]^H * Phi_B * bs_ris + lu_direct[m]^H.
struct ChannelRealization {
    MatrixXcd bs_ris;                // N x L
    std::vector<VectorXcd> lu_direct; // L each
    std::vector<VectorXcd> lu_ris;    // N each
    VectorXcd eve_direct;             // L
    VectorXcd eve_ris;                // N
    VectorXcd st_direct;              // L
    VectorXcd st_ris;                 // N
    int slot = 0;

    int antennas() const { return static_cast<int>(bs_ris.cols()); }
    int elements() const { return static_cast<int>(bs_ris.rows()); }
    int users() const { return static_cast<int>(lu_direct.size()); }
    bool all_finite() const;
};

// Urban LoS loss in dB; d in meters, carrier in GHz.
double path_loss_los(double d, double f_ghz);
// Urban NLoS loss in dB, never below the LoS loss.
double path_loss_nlos(double d, double f_ghz, double z_r);

VectorXcd steering_bs(int antennas, double angle, double spacing, double wavelength);
VectorXcd steering_ris(int elements, double elevation, double azimuth, double spacing, double wavelength,
                       int elements_per_row);

struct LinkAngles {
    double bs_departure = 0.0; // beta_b
    double ris_elevation = 0.0; // beta_r
    double ris_azimuth = 0.0;   // zeta_r
};

LinkAngles bs_ris_angles(const SystemGeometry& geometry);

// sqrt(lin_loss) * (sqrt(F/(F+1)) f_r f_b^T + sqrt(1/(F+1)) V)
MatrixXcd rician_channel(const FadingParams& params, const Dimensions& dims, double loss_db,
                         const LinkAngles& angles, Rng& rng);

// Per-link path losses (dB) derived from geometry; cached by the environment.
struct LinkLosses {
    double bs_ris = 0.0;
    std::vector<double> lu_direct;
    std::vector<double> lu_ris;
    double eve_direct = 0.0;
    double eve_ris = 0.0;
    double st_direct = 0.0;
    double st_ris = 0.0;
};

LinkLosses link_losses(const SystemGeometry& geometry, const FadingParams& params);

// One independent realization per slot; each link draws from its own stream of `seed`.
std::vector<ChannelRealization> generate_episode_channels(const SystemGeometry& geometry,
                                                          const FadingParams& params, const Dimensions& dims,
                                                          int slots, std::uint64_t seed);

} // namespace starsec::channel
