#include "starsec/channel.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace starsec::channel {

namespace {

void require_positive(double value, const char* what)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::domain_error(std::string(what) + " must be positive and finite");
    }
}

VectorXcd nlos_vector(int size, double loss_db, Rng& rng)
{
    const double scale = std::sqrt(db_to_linear(-loss_db));
    VectorXcd v(size);
    for (int i = 0; i < size; ++i) {
        v(i) = scale * complex_normal(rng);
    }
    return v;
}

// Stream labels; each link owns one so that adding links leaves the others untouched.
constexpr std::uint64_t kStreamBsRis = 1;
constexpr std::uint64_t kStreamEveDirect = 2;
constexpr std::uint64_t kStreamEveRis = 3;
constexpr std::uint64_t kStreamStDirect = 4;
constexpr std::uint64_t kStreamStRis = 5;
constexpr std::uint64_t kStreamLuDirect = 100;
constexpr std::uint64_t kStreamLuRis = 200;

} // namespace

Side SystemGeometry::side_of(const Vector3d& p) const
{
    return (p - ris_position).dot(ris_normal) > 0.0 ? Side::A : Side::B;
}

void SystemGeometry::validate() const
{
    if (lu_positions.empty()) {
        throw std::invalid_argument("geometry needs at least one LU");
    }
    if (std::abs(ris_normal.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("ris_normal must be a unit vector");
    }
    std::vector<Vector3d> points{bs_position, ris_position, eve_position, st_position};
    points.insert(points.end(), lu_positions.begin(), lu_positions.end());
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if ((points[i] - points[j]).norm() <= 0.0) {
                throw std::invalid_argument("geometry has coincident nodes");
            }
        }
    }
    if (side_of(st_position) != Side::A) {
        throw std::invalid_argument("ST must lie on the reflection side (A)");
    }
    if (side_of(eve_position) != Side::B) {
        throw std::invalid_argument("Eve must lie on the transmission side (B)");
    }
    for (const auto& lu : lu_positions) {
        if (side_of(lu) != Side::B) {
            throw std::invalid_argument("LUs must lie on the transmission side (B)");
        }
    }
    if (side_of(bs_position) != Side::A) {
        throw std::invalid_argument("BS must face the reflection side (A)");
    }
}

SystemGeometry SystemGeometry::desk_default(int num_lus)
{
    // Surface on a facade; LUs and Eve a few meters behind it (side B), ST in front (side A).
    SystemGeometry g;
    const Vector3d offsets[] = {{2.5, 3.0, -1.0}, {3.0, 1.5, -1.5}, {1.5, 3.5, -2.0}, {3.5, 2.5, -0.5}};
    for (int m = 0; m < num_lus; ++m) {
        const Vector3d base = offsets[m % 4];
        const double push = 1.0 + 0.5 * (m / 4);
        g.lu_positions.push_back(g.ris_position + push * base);
    }
    g.eve_position = g.ris_position + Vector3d{3.5, 3.5, -1.0};
    g.st_position = g.ris_position + Vector3d{-3.0, -3.5, -1.0};
    return g;
}

FadingParams FadingParams::from_db(double rician_db, double carrier_ghz, int elements_per_row)
{
    FadingParams p;
    p.rician_factor = db_to_linear(rician_db);
    p.carrier_ghz = carrier_ghz;
    p.elements_per_row = elements_per_row;
    return p;
}

bool ChannelRealization::all_finite() const
{
    auto finite = [](const auto& m) { return m.allFinite(); };
    bool ok = finite(bs_ris) && finite(eve_direct) && finite(eve_ris) && finite(st_direct) && finite(st_ris);
    for (const auto& v : lu_direct) ok = ok && finite(v);
    for (const auto& v : lu_ris) ok = ok && finite(v);
    return ok;
}

double path_loss_los(double d, double f_ghz)
{
    require_positive(d, "distance");
    require_positive(f_ghz, "carrier frequency");
    return 20.0 * std::log10(f_ghz) + 22.0 * std::log10(d) + 28.0;
}

double path_loss_nlos(double d, double f_ghz, double z_r)
{
    const double los = path_loss_los(d, f_ghz);
    const double nlos = 26.0 * std::log10(f_ghz) + 36.7 * std::log10(d) + 22.7 - 0.3 * (z_r - 1.5);
    return std::max(nlos, los);
}

VectorXcd steering_bs(int antennas, double angle, double spacing, double wavelength)
{
    if (antennas < 1) {
        throw std::domain_error("antenna count must be >= 1");
    }
    VectorXcd f(antennas);
    const double step = 2.0 * kPi * spacing * std::sin(angle) / wavelength;
    for (int l = 0; l < antennas; ++l) {
        f(l) = std::polar(1.0, step * l);
    }
    return f;
}

VectorXcd steering_ris(int elements, double elevation, double azimuth, double spacing, double wavelength,
                       int elements_per_row)
{
    if (elements_per_row <= 0) {
        throw std::domain_error("elements per row must be positive");
    }
    if (elements % elements_per_row != 0) {
        throw std::domain_error("elements per row must divide the element count");
    }
    const double eta1 = std::sin(elevation) * std::sin(azimuth);
    const double eta2 = std::sin(elevation) * std::cos(azimuth);
    VectorXcd f(elements);
    for (int i = 0; i < elements; ++i) {
        const int row = i / elements_per_row;
        const int col = i % elements_per_row;
        f(i) = std::polar(1.0, 2.0 * kPi * spacing * (row * eta1 + col * eta2) / wavelength);
    }
    return f;
}

LinkAngles bs_ris_angles(const SystemGeometry& geometry)
{
    const Vector3d bs_to_ris = (geometry.ris_position - geometry.bs_position).normalized();
    LinkAngles a;
    a.bs_departure = std::asin(std::clamp(bs_to_ris.dot(geometry.bs_array_axis.normalized()), -1.0, 1.0));

    // Arrival direction seen from the surface, in its local frame (normal, horizontal, vertical).
    const Vector3d arrival = -bs_to_ris;
    const Vector3d& normal = geometry.ris_normal;
    Vector3d horizontal = normal.cross(Vector3d::UnitZ());
    if (horizontal.norm() < 1e-12) {
        horizontal = Vector3d::UnitX();
    }
    horizontal.normalize();
    const Vector3d vertical = horizontal.cross(normal).normalized();
    a.ris_elevation = std::acos(std::clamp(arrival.dot(normal), -1.0, 1.0));
    a.ris_azimuth = std::atan2(arrival.dot(vertical), arrival.dot(horizontal));
    return a;
}

MatrixXcd rician_channel(const FadingParams& params, const Dimensions& dims, double loss_db,
                         const LinkAngles& angles, Rng& rng)
{
    if (!std::isfinite(loss_db)) {
        throw std::domain_error("path loss must be finite");
    }
    const double lambda = params.wavelength();
    const VectorXcd fr = steering_ris(dims.elements, angles.ris_elevation, angles.ris_azimuth, params.ris_spacing(),
                                      lambda, params.elements_per_row);
    const VectorXcd fb = steering_bs(dims.antennas, angles.bs_departure, params.bs_spacing(), lambda);
    const double F = params.rician_factor;
    const double w_los = std::sqrt(F / (F + 1.0));
    const double w_nlos = std::sqrt(1.0 / (F + 1.0));

    MatrixXcd h(dims.elements, dims.antennas);
    // Column-major draw order keeps the stream layout independent of the LoS term.
    for (int l = 0; l < dims.antennas; ++l) {
        for (int n = 0; n < dims.elements; ++n) {
            h(n, l) = w_los * fr(n) * fb(l) + w_nlos * complex_normal(rng);
        }
    }
    return std::sqrt(db_to_linear(-loss_db)) * h;
}

LinkLosses link_losses(const SystemGeometry& geometry, const FadingParams& params)
{
    const double f = params.carrier_ghz;
    const double z = params.receiver_height;
    auto from_bs = [&](const Vector3d& p) { return path_loss_nlos((p - geometry.bs_position).norm(), f, z); };
    auto from_ris = [&](const Vector3d& p) { return path_loss_nlos((p - geometry.ris_position).norm(), f, z); };

    LinkLosses out;
    out.bs_ris = path_loss_los((geometry.ris_position - geometry.bs_position).norm(), f);
    for (const auto& lu : geometry.lu_positions) {
        out.lu_direct.push_back(from_bs(lu));
        out.lu_ris.push_back(from_ris(lu));
    }
    out.eve_direct = from_bs(geometry.eve_position);
    out.eve_ris = from_ris(geometry.eve_position);
    out.st_direct = from_bs(geometry.st_position);
    out.st_ris = from_ris(geometry.st_position);
    return out;
}

std::vector<ChannelRealization> generate_episode_channels(const SystemGeometry& geometry,
                                                          const FadingParams& params, const Dimensions& dims,
                                                          int slots, std::uint64_t seed)
{
    if (slots < 1) {
        throw std::domain_error("slot count must be >= 1");
    }
    if (static_cast<int>(geometry.lu_positions.size()) != dims.users) {
        throw std::invalid_argument("geometry LU count does not match dimensions");
    }
    const LinkLosses loss = link_losses(geometry, params);
    const LinkAngles angles = bs_ris_angles(geometry);
    const int L = dims.antennas;
    const int N = dims.elements;

    Rng bs_ris = make_stream(seed, kStreamBsRis);
    Rng eve_direct = make_stream(seed, kStreamEveDirect);
    Rng eve_ris = make_stream(seed, kStreamEveRis);
    Rng st_direct = make_stream(seed, kStreamStDirect);
    Rng st_ris = make_stream(seed, kStreamStRis);
    std::vector<Rng> lu_direct;
    std::vector<Rng> lu_ris;
    for (int m = 0; m < dims.users; ++m) {
        lu_direct.push_back(make_stream(seed, kStreamLuDirect + m));
        lu_ris.push_back(make_stream(seed, kStreamLuRis + m));
    }

    std::vector<ChannelRealization> out;
    out.reserve(slots);
    for (int t = 0; t < slots; ++t) {
        ChannelRealization ch;
        ch.slot = t;
        ch.bs_ris = rician_channel(params, dims, loss.bs_ris, angles, bs_ris);
        for (int m = 0; m < dims.users; ++m) {
            ch.lu_direct.push_back(nlos_vector(L, loss.lu_direct[m], lu_direct[m]));
            ch.lu_ris.push_back(nlos_vector(N, loss.lu_ris[m], lu_ris[m]));
        }
        ch.eve_direct = nlos_vector(L, loss.eve_direct, eve_direct);
        ch.eve_ris = nlos_vector(N, loss.eve_ris, eve_ris);
        ch.st_direct = nlos_vector(L, loss.st_direct, st_direct);
        ch.st_ris = nlos_vector(N, loss.st_ris, st_ris);
        out.push_back(std::move(ch));
    }
    return out;
}

} // namespace starsec::channel
