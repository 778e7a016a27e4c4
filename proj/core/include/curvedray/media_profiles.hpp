#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "curvedray/vec3.hpp"

namespace curvedray {

/// Which scalar a field stores. Speeds are in m/s; indices are relative to a
/// reference speed c0 so that n = c0 / c.
enum class Quantity { speed, index, index_squared };

std::string_view quantity_name(Quantity q);          // "c", "n", "n2"
Quantity parse_quantity(std::string_view name);      // throws FormatError

/// Convert one sample between quantities using n = c0 / c.
double convert_quantity(double value, Quantity from, Quantity to, double reference_speed);

struct AtmosphericConstants {
    double molar_mass = 28.96e-3;      // kg/mol
    double gas_constant = 8.3145;      // J/(mol K)
    double gamma = 1.4;
    double dry_air_gas_constant = 287.05;  // J/(kg K)
    double cauchy_a = 2879e-5;
    double cauchy_b = 567e-5;          // um^2
};

/// rho = P M / (R T).
double density_from_gas_law(double pressure, double temperature,
                            const AtmosphericConstants& consts = {});

/// Cauchy dispersion combined with Gladstone-Dale. `wavelength` is in
/// micrometers and `relative_density` is density over a sea-level reference.
double light_refractive_index(double relative_density, double wavelength,
                              const AtmosphericConstants& consts = {});

/// c = sqrt(gamma Rd T).
double sound_speed_from_temperature(double temperature, const AtmosphericConstants& consts = {});

struct StratifiedParams {
    double b = 1.0;     // m/s, positive refracts downward
    double c0 = 340.0;  // m/s
    double zg = 1.0;    // m
};

/// n_str(z) = c0 / (c0 + b ln(z/zg + 1)).
double stratified_n(double z, const StratifiedParams& p);

struct FluctuationMode {
    Vec3 wave_vector;  // 1/m
    double phase = 0.0;
    double amplitude = 0.0;
};

struct FluctuationField {
    std::vector<FluctuationMode> modes;

    /// Deterministic random field: directions uniform on the sphere,
    /// wavelengths uniform in [min_wavelength, max_wavelength], equal
    /// amplitudes summing to `total_amplitude`.
    static FluctuationField random(std::uint64_t seed, int mode_count, double min_wavelength,
                                   double max_wavelength, double total_amplitude);

    double amplitude_bound() const;
};

/// Sum of G cos(k . x + phi).
double fluctuation_n(const Vec3& x, const FluctuationField& f);
Vec3 fluctuation_gradient(const Vec3& x, const FluctuationField& f);

struct HotSpotParams {
    Vec3 center;
    double ts = 373.0;  // K
    double t0 = 273.0;  // K
    double d0 = 5.0;    // m
    StratifiedParams base{-1.0, 340.0, 1.0};
};

double hotspot_temperature(const Vec3& x, const HotSpotParams& p);

enum class WindDirection { upwind, downwind };

struct WindOverHillParams {
    double u_star = 0.5;       // m/s
    double von_karman = 0.4;
    double zg = 0.1;           // m
    double hill_height = 0.0;  // m
    double hill_radius = 50.0; // m, L
    double influence_thickness = 10.0;  // m, l
    double z0 = 0.1;           // m
    Vec3 hill_apex;            // x, y of apex; z ignored
    WindDirection direction = WindDirection::upwind;
    double c0 = 340.0;         // m/s, still-air sound speed
};

/// Terrain height h / (1 + (x/L)^2) at horizontal distance x from the apex.
double hill_height_at(double x, const WindOverHillParams& p);

/// u(z) = (u*/K) ln(z/zg) plus the hill perturbation when h != 0.
/// `x` is the horizontal distance from the apex. Requires z > 0.
double wind_speed(double x, double z, const WindOverHillParams& p);

/// Analytic media description. Every profile exposes the relative index
/// n = c0 / c; other quantities derive from it.
class Profile {
public:
    virtual ~Profile() = default;

    virtual std::string_view kind() const = 0;
    virtual double reference_speed() const = 0;
    virtual double index(const Vec3& x) const = 0;

    /// Gradient of n. The default uses central differences and falls back to
    /// a one-sided stencil where the profile rejects the mirrored point.
    virtual Vec3 index_gradient(const Vec3& x) const;

    double value(const Vec3& x, Quantity q) const;
    Vec3 gradient(const Vec3& x, Quantity q) const;
};

class ConstantProfile final : public Profile {
public:
    explicit ConstantProfile(double n = 1.0, double c0 = 340.0) : n_(n), c0_(c0) {}
    std::string_view kind() const override { return "constant"; }
    double reference_speed() const override { return c0_; }
    double index(const Vec3&) const override { return n_; }
    Vec3 index_gradient(const Vec3&) const override { return {}; }

private:
    double n_, c0_;
};

/// c(x) = c_origin + g . x. Rays in this medium are exact circles.
class LinearSpeedProfile final : public Profile {
public:
    LinearSpeedProfile(double c_origin, const Vec3& gradient, double c0 = 340.0)
        : c_origin_(c_origin), g_(gradient), c0_(c0) {}
    std::string_view kind() const override { return "linear_speed"; }
    double reference_speed() const override { return c0_; }
    double index(const Vec3& x) const override;
    Vec3 index_gradient(const Vec3& x) const override;
    double speed(const Vec3& x) const;
    double c_origin() const { return c_origin_; }
    const Vec3& speed_gradient() const { return g_; }

private:
    double c_origin_;
    Vec3 g_;
    double c0_;
};

/// n^2(x) = n2_origin + g . x. Rays in this medium are exact parabolas.
class LinearIndexSquaredProfile final : public Profile {
public:
    LinearIndexSquaredProfile(double n2_origin, const Vec3& gradient, double c0 = 1.0)
        : n2_origin_(n2_origin), g_(gradient), c0_(c0) {}
    std::string_view kind() const override { return "linear_index_squared"; }
    double reference_speed() const override { return c0_; }
    double index(const Vec3& x) const override;
    Vec3 index_gradient(const Vec3& x) const override;
    double n2_origin() const { return n2_origin_; }
    const Vec3& index_squared_gradient() const { return g_; }

private:
    double n2_origin_;
    Vec3 g_;
    double c0_;
};

/// n = n_str(z) + n_flu(x). Covers A-LU, A-LD and their +F variants.
class StratifiedProfile final : public Profile {
public:
    explicit StratifiedProfile(StratifiedParams p, FluctuationField f = {})
        : p_(p), f_(std::move(f)) {}
    std::string_view kind() const override { return "stratified"; }
    double reference_speed() const override { return p_.c0; }
    double index(const Vec3& x) const override;
    Vec3 index_gradient(const Vec3& x) const override;
    const StratifiedParams& params() const { return p_; }
    const FluctuationField& fluctuation() const { return f_; }

private:
    StratifiedParams p_;
    FluctuationField f_;
};

/// Stratified speed perturbed by the temperature-driven speed change of a
/// local heat source: c = c_str(z) + sqrt(gRdT(x)) - sqrt(gRdT0).
class HotSpotProfile final : public Profile {
public:
    explicit HotSpotProfile(HotSpotParams p, AtmosphericConstants consts = {})
        : p_(p), consts_(consts) {}
    std::string_view kind() const override { return "hotspot"; }
    double reference_speed() const override { return p_.base.c0; }
    double index(const Vec3& x) const override;
    double speed(const Vec3& x) const;
    const HotSpotParams& params() const { return p_; }

private:
    HotSpotParams p_;
    AtmosphericConstants consts_;
};

/// Effective speed c0 +/- (u + du) above the hill, with height measured from
/// the local terrain and clamped to at least z0.
class WindOverHillProfile final : public Profile {
public:
    explicit WindOverHillProfile(WindOverHillParams p) : p_(p) {}
    std::string_view kind() const override { return "wind_over_hill"; }
    double reference_speed() const override { return p_.c0; }
    double index(const Vec3& x) const override;
    double speed(const Vec3& x) const;
    const WindOverHillParams& params() const { return p_; }

private:
    WindOverHillParams p_;
};

enum class MirageKind { inferior, superior };

struct MirageParams {
    double mu0 = 1.000233;
    double mu1 = 0.4584;
    double beta = 2.303;  // 1/m
    MirageKind kind = MirageKind::inferior;
};

/// Inferior: n^2 = mu0^2 + mu1^2 (1 - exp(-beta z)).
/// Superior: n^2 = mu0^2 + mu1^2 exp(-beta z).
class MirageProfile final : public Profile {
public:
    explicit MirageProfile(MirageParams p) : p_(p) {}
    std::string_view kind() const override { return "mirage"; }
    double reference_speed() const override { return 1.0; }
    double index(const Vec3& x) const override;
    Vec3 index_gradient(const Vec3& x) const override;
    double index_squared(double z) const;
    const MirageParams& params() const { return p_; }

private:
    MirageParams p_;
};

}  // namespace curvedray
