#include "curvedray/media_profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "curvedray/error.hpp"

namespace curvedray {

std::string_view quantity_name(Quantity q) {
    switch (q) {
        case Quantity::speed: return "c";
        case Quantity::index: return "n";
        case Quantity::index_squared: return "n2";
    }
    return "?";
}

Quantity parse_quantity(std::string_view name) {
    if (name == "c" || name == "speed") return Quantity::speed;
    if (name == "n" || name == "index") return Quantity::index;
    if (name == "n2" || name == "index_squared") return Quantity::index_squared;
    throw FormatError("unknown quantity '" + std::string(name) + "'");
}

double convert_quantity(double value, Quantity from, Quantity to, double reference_speed) {
    if (from == to) return value;
    double n = 0.0;
    switch (from) {
        case Quantity::speed: n = reference_speed / value; break;
        case Quantity::index: n = value; break;
        case Quantity::index_squared: n = std::sqrt(value); break;
    }
    switch (to) {
        case Quantity::speed: return reference_speed / n;
        case Quantity::index: return n;
        case Quantity::index_squared: return n * n;
    }
    return n;
}

double density_from_gas_law(double pressure, double temperature, const AtmosphericConstants& c) {
    if (!(pressure > 0.0) || !(temperature > 0.0))
        throw DomainError("density_from_gas_law: pressure and temperature must be positive");
    return pressure * c.molar_mass / (c.gas_constant * temperature);
}

double light_refractive_index(double relative_density, double wavelength,
                              const AtmosphericConstants& c) {
    if (relative_density < 0.0) throw DomainError("light_refractive_index: negative density");
    if (!(wavelength > 0.0)) throw DomainError("light_refractive_index: wavelength must be positive");
    const double n_lambda = c.cauchy_a * (1.0 + c.cauchy_b / (wavelength * wavelength)) + 1.0;
    return relative_density * (n_lambda - 1.0) + 1.0;
}

double sound_speed_from_temperature(double temperature, const AtmosphericConstants& c) {
    if (!(temperature > 0.0)) throw DomainError("sound_speed_from_temperature: T must be positive");
    return std::sqrt(c.gamma * c.dry_air_gas_constant * temperature);
}

double stratified_n(double z, const StratifiedParams& p) {
    if (z < 0.0) throw DomainError("stratified_n: z must be non-negative");
    return p.c0 / (p.c0 + p.b * std::log(z / p.zg + 1.0));
}

namespace {

// 53-bit mantissa fill; std::uniform_real_distribution differs between
// standard libraries.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1p-53;
}

}  // namespace

FluctuationField FluctuationField::random(std::uint64_t seed, int mode_count, double min_wavelength,
                                          double max_wavelength, double total_amplitude) {
    if (mode_count < 0) throw DomainError("FluctuationField::random: negative mode count");
    if (!(min_wavelength > 0.0) || max_wavelength < min_wavelength)
        throw DomainError("FluctuationField::random: bad wavelength range");
    std::mt19937_64 rng(seed);
    FluctuationField f;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < mode_count; ++i) {
        const double cz = 2.0 * unit_uniform(rng) - 1.0;
        const double az = two_pi * unit_uniform(rng);
        const double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
        const Vec3 dir{sz * std::cos(az), sz * std::sin(az), cz};
        const double lambda = min_wavelength + (max_wavelength - min_wavelength) * unit_uniform(rng);
        FluctuationMode m;
        m.wave_vector = dir * (two_pi / lambda);
        m.phase = two_pi * unit_uniform(rng);
        m.amplitude = total_amplitude / mode_count;
        f.modes.push_back(m);
    }
    return f;
}

double FluctuationField::amplitude_bound() const {
    double s = 0.0;
    for (const auto& m : modes) s += std::fabs(m.amplitude);
    return s;
}

double fluctuation_n(const Vec3& x, const FluctuationField& f) {
    double s = 0.0;
    for (const auto& m : f.modes) s += m.amplitude * std::cos(dot(m.wave_vector, x) + m.phase);
    return s;
}

Vec3 fluctuation_gradient(const Vec3& x, const FluctuationField& f) {
    Vec3 g;
    for (const auto& m : f.modes) g -= m.wave_vector * (m.amplitude * std::sin(dot(m.wave_vector, x) + m.phase));
    return g;
}

double hotspot_temperature(const Vec3& x, const HotSpotParams& p) {
    const double d = distance(x, p.center);
    return p.t0 + (p.ts - p.t0) * std::exp(-d / p.d0);
}

double hill_height_at(double x, const WindOverHillParams& p) {
    const double r = x / p.hill_radius;
    return p.hill_height / (1.0 + r * r);
}

namespace {

double log_law(double z, const WindOverHillParams& p) {
    return p.u_star / p.von_karman * std::log(z / p.zg);
}

double hill_perturbation(double x, double z, const WindOverHillParams& p) {
    if (p.hill_height == 0.0) return 0.0;
    const double L = p.hill_radius;
    const double l = p.influence_thickness;
    const double r = x / L;
    const double dz = std::max(z - hill_height_at(x, p), p.z0);
    const double u_l = log_law(L, p);
    const double ln_l = std::log(l / p.z0);
    const double pref = u_l * (p.hill_height / L) * std::log(L / p.z0) / (ln_l * ln_l);
    const double ln_dz = std::log(dz / p.z0);
    const double q = 1.0 + r * r;
    return pref * ((1.0 - r * r) / q * ln_dz - 2.0 * r / (q * q) * ((dz - p.z0) / l) * ln_dz);
}

}  // namespace

double wind_speed(double x, double z, const WindOverHillParams& p) {
    if (!(z > 0.0)) throw DomainError("wind_speed: z must be positive");
    return log_law(z, p) + hill_perturbation(x, z, p);
}

Vec3 Profile::index_gradient(const Vec3& x) const {
    Vec3 g;
    for (int a = 0; a < 3; ++a) {
        const double h = 1e-6 * std::max(1.0, std::fabs(x[a]));
        Vec3 xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        const double f0 = index(x);
        double fp = 0.0, fm = 0.0;
        bool has_p = true, has_m = true;
        try { fp = index(xp); } catch (const DomainError&) { has_p = false; }
        try { fm = index(xm); } catch (const DomainError&) { has_m = false; }
        if (has_p && has_m) g[a] = (fp - fm) / (2.0 * h);
        else if (has_p) g[a] = (fp - f0) / h;
        else if (has_m) g[a] = (f0 - fm) / h;
    }
    return g;
}

double Profile::value(const Vec3& x, Quantity q) const {
    return convert_quantity(index(x), Quantity::index, q, reference_speed());
}

Vec3 Profile::gradient(const Vec3& x, Quantity q) const {
    const Vec3 gn = index_gradient(x);
    const double n = index(x);
    switch (q) {
        case Quantity::index: return gn;
        case Quantity::index_squared: return gn * (2.0 * n);
        case Quantity::speed: return gn * (-reference_speed() / (n * n));
    }
    return gn;
}

double LinearSpeedProfile::speed(const Vec3& x) const {
    const double c = c_origin_ + dot(g_, x);
    if (!(c > 0.0)) throw DomainError("LinearSpeedProfile: non-positive speed");
    return c;
}

double LinearSpeedProfile::index(const Vec3& x) const { return c0_ / speed(x); }

Vec3 LinearSpeedProfile::index_gradient(const Vec3& x) const {
    const double c = speed(x);
    return g_ * (-c0_ / (c * c));
}

double LinearIndexSquaredProfile::index(const Vec3& x) const {
    const double n2 = n2_origin_ + dot(g_, x);
    if (!(n2 > 0.0)) throw DomainError("LinearIndexSquaredProfile: non-positive n^2");
    return std::sqrt(n2);
}

Vec3 LinearIndexSquaredProfile::index_gradient(const Vec3& x) const {
    return g_ * (0.5 / index(x));
}

double StratifiedProfile::index(const Vec3& x) const {
    return stratified_n(x.z, p_) + fluctuation_n(x, f_);
}

Vec3 StratifiedProfile::index_gradient(const Vec3& x) const {
    if (x.z < 0.0) throw DomainError("stratified_n: z must be non-negative");
    const double den = p_.c0 + p_.b * std::log(x.z / p_.zg + 1.0);
    const double dndz = -p_.c0 * p_.b / ((x.z + p_.zg) * den * den);
    return Vec3{0.0, 0.0, dndz} + fluctuation_gradient(x, f_);
}

double HotSpotProfile::speed(const Vec3& x) const {
    const double c_str = p_.base.c0 / stratified_n(x.z, p_.base);
    const double t = hotspot_temperature(x, p_);
    return c_str + sound_speed_from_temperature(t, consts_) -
           sound_speed_from_temperature(p_.t0, consts_);
}

double HotSpotProfile::index(const Vec3& x) const { return p_.base.c0 / speed(x); }

double WindOverHillProfile::speed(const Vec3& x) const {
    if (x.z < 0.0) throw DomainError("WindOverHillProfile: z must be non-negative");
    const double dx = x.x - p_.hill_apex.x;
    const double z = std::max(x.z, p_.zg);
    const double u = log_law(z, p_) + hill_perturbation(dx, x.z, p_);
    return p_.direction == WindDirection::upwind ? p_.c0 + u : p_.c0 - u;
}

double WindOverHillProfile::index(const Vec3& x) const { return p_.c0 / speed(x); }

double MirageProfile::index_squared(double z) const {
    if (z < 0.0) throw DomainError("MirageProfile: z must be non-negative");
    const double e = std::exp(-p_.beta * z);
    const double base = p_.mu0 * p_.mu0;
    const double amp = p_.mu1 * p_.mu1;
    return p_.kind == MirageKind::inferior ? base + amp * (1.0 - e) : base + amp * e;
}

double MirageProfile::index(const Vec3& x) const { return std::sqrt(index_squared(x.z)); }

Vec3 MirageProfile::index_gradient(const Vec3& x) const {
    const double e = std::exp(-p_.beta * x.z);
    const double amp = p_.mu1 * p_.mu1 * p_.beta * e;
    const double dn2 = p_.kind == MirageKind::inferior ? amp : -amp;
    return {0.0, 0.0, dn2 / (2.0 * index(x))};
}

}  // namespace curvedray
