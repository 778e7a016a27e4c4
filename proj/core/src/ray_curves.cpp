#include "curvedray/ray_curves.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "curvedray/error.hpp"

namespace curvedray {

std::string_view curve_kind_name(CurveKind k) {
    switch (k) {
        case CurveKind::linear: return "linear";
        case CurveKind::circular: return "circular";
        case CurveKind::parabolic: return "parabolic";
    }
    return "linear";
}

namespace {

constexpr double kParallelCos = 1e-12;

// sin(x)/x
double sinc(double x) {
    if (std::fabs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

// 2 atan(t) / kappa with t = num / kappa-scaled quantity, stable for small t.
double angle_param(double t, double t_over_kappa, double kappa) {
    if (std::fabs(t) < 1e-4) {
        const double t2 = t * t;
        return 2.0 * t_over_kappa * (1.0 - t2 / 3.0 + t2 * t2 / 5.0);
    }
    double delta = 2.0 * std::atan(t);
    if (delta < 0.0) delta += 2.0 * std::numbers::pi;
    return delta / kappa;
}

Vec3 any_perpendicular(const Vec3& v) {
    const Vec3 a = std::fabs(v.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    return normalized(cross(v, a));
}

// Roots of A t^2 + B t + C = 0 without cancellation. Returns count.
int solve_quadratic(double A, double B, double C, double roots[2]) {
    if (A == 0.0) {
        if (B == 0.0) return 0;
        roots[0] = -C / B;
        return 1;
    }
    const double disc = B * B - 4.0 * A * C;
    if (disc < 0.0) return 0;
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
    if (q == 0.0) {
        roots[0] = 0.0;
        return 1;
    }
    roots[0] = q / A;
    roots[1] = C / q;
    return 2;
}

}  // namespace

std::pair<double, double> RaySegment::local(double p) const {
    switch (kind) {
        case CurveKind::linear: return {p * cos0, p * sin0};
        case CurveKind::circular: {
            const double d = kappa * p;
            const double h = 0.5 * d;
            const double one_minus_cos = p * std::sin(h) * sinc(h);  // (1 - cos d) / kappa
            const double sin_term = p * sinc(d);                      // sin d / kappa
            return {sin0 * one_minus_cos + cos0 * sin_term, sin0 * sin_term - cos0 * one_minus_cos};
        }
        case CurveKind::parabolic: return {xi * p, n0 * sin0 * p + 0.25 * alpha * p * p};
    }
    return {0.0, 0.0};
}

Vec3 RaySegment::point(double p) const {
    if (kind == CurveKind::linear) return frame.origin + direction * p;
    const auto [r, z] = local(p);
    return frame.to_world(r, z);
}

Vec3 RaySegment::tangent_at(double p) const {
    switch (kind) {
        case CurveKind::linear: return direction;
        case CurveKind::circular: {
            const double a = theta0 - kappa * p;
            return normalized(frame.r_axis * std::cos(a) + frame.z_axis * std::sin(a));
        }
        case CurveKind::parabolic:
            return normalized(frame.r_axis * xi + frame.z_axis * (n0 * sin0 + 0.5 * alpha * p));
    }
    return direction;
}

double RaySegment::arc_length(double p0, double p1) const {
    if (p1 == p0) return 0.0;
    if (kind != CurveKind::parabolic) return p1 - p0;
    const double u0 = n0 * sin0 + 0.5 * alpha * p0;
    const double u1 = n0 * sin0 + 0.5 * alpha * p1;
    const double speed0 = std::sqrt(xi * xi + u0 * u0);
    if (std::fabs(u1 - u0) <= 1e-3 * speed0) {
        // 4-point Gauss-Legendre on ds/dsigma = sqrt(xi^2 + u^2).
        static constexpr double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                        0.8611363115940526};
        static constexpr double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                        0.3478548451374538};
        const double mid = 0.5 * (p0 + p1), half = 0.5 * (p1 - p0);
        double s = 0.0;
        for (int i = 0; i < 4; ++i) {
            const double u = n0 * sin0 + 0.5 * alpha * (mid + half * x[i]);
            s += w[i] * std::sqrt(xi * xi + u * u);
        }
        return s * half;
    }
    auto F = [&](double u) { return u * std::sqrt(xi * xi + u * u) + xi * xi * std::asinh(u / xi); };
    return (F(u1) - F(u0)) / alpha;
}

std::optional<double> RaySegment::turning_param() const {
    switch (kind) {
        case CurveKind::linear: return std::nullopt;
        case CurveKind::circular:
            if (sin0 > 0.0) return theta0 / kappa;
            return std::nullopt;
        case CurveKind::parabolic:
            if (sin0 < 0.0) return -2.0 * n0 * sin0 / alpha;
            return std::nullopt;
    }
    return std::nullopt;
}

std::optional<double> RaySegment::turning_point() const {
    switch (kind) {
        case CurveKind::linear: return std::nullopt;
        case CurveKind::circular:
            if (sin0 > 0.0) return (1.0 / xi - m0) / alpha;
            return std::nullopt;
        case CurveKind::parabolic:
            if (sin0 < 0.0) return (xi * xi - n0 * n0) / alpha;
            return std::nullopt;
    }
    return std::nullopt;
}

double RaySegment::eval_r(double z) const {
    switch (kind) {
        case CurveKind::linear:
            if (sin0 == 0.0) {
                if (z == 0.0) return 0.0;
                throw DomainError("eval_r: horizontal straight ray never leaves z = 0");
            }
            if (z / sin0 < 0.0) throw DomainError("eval_r: z lies behind the origin");
            return z * cos0 / sin0;
        case CurveKind::circular: {
            // Snell: cos(theta(z)) = xi c(z) = cos0 + kappa z.
            const double w = cos0 + kappa * z;
            const double rad = 1.0 - w * w;
            if (rad < 0.0) throw DomainError("eval_r: z beyond the turning point");
            const double sgn = sin0 > 0.0 ? 1.0 : -1.0;
            const double den = sin0 + sgn * std::sqrt(rad);
            if (den == 0.0) {
                if (z == 0.0) return 0.0;
                throw DomainError("eval_r: z not on the initial branch");
            }
            const double r = z * (2.0 * cos0 + kappa * z) / den;
            if (r < 0.0) throw DomainError("eval_r: z not on the initial branch");
            return r;
        }
        case CurveKind::parabolic: {
            // sqrt(-xi^2 + n0^2 + alpha z) is the vertical ray momentum at z.
            const double rad = n0 * n0 - xi * xi + alpha * z;
            if (rad < 0.0) throw DomainError("eval_r: z beyond the turning point");
            const double pz0 = n0 * sin0;
            const double sgn = sin0 >= 0.0 ? 1.0 : -1.0;
            const double sum = pz0 + sgn * std::sqrt(rad);
            // sigma = 2 (pz(z) - pz0) / alpha = 2 z / (pz0 + pz(z))
            if (sum == 0.0) {
                if (z == 0.0) return 0.0;
                throw DomainError("eval_r: z not on the initial branch");
            }
            const double sigma = 2.0 * z / sum;
            if (sigma < 0.0) throw DomainError("eval_r: z not on the initial branch");
            return xi * sigma;
        }
    }
    return 0.0;
}

Vec3 RaySegment::tangent(double z) const {
    double dr = 0.0, dz = 0.0;
    switch (kind) {
        case CurveKind::linear: return direction;
        case CurveKind::circular: {
            // dr/dz = xi c / sqrt(1 - xi^2 c^2)
            const double xc = xi * (alpha * z + m0);
            const double rad = 1.0 - xc * xc;
            if (rad < 0.0) throw DomainError("tangent: z beyond the turning point");
            dr = xc;
            dz = std::sqrt(rad);
            if (sin0 < 0.0 || (sin0 == 0.0 && z < 0.0)) dz = -dz;
            break;
        }
        case CurveKind::parabolic: {
            // dr/dz = xi / sqrt(-xi^2 + alpha z + n0^2)
            const double rad = -xi * xi + alpha * z + n0 * n0;
            if (rad < 0.0) throw DomainError("tangent: z beyond the turning point");
            dr = xi;
            dz = std::sqrt(rad);
            if (sin0 < 0.0) dz = -dz;
            break;
        }
    }
    return normalized(frame.r_axis * dr + frame.z_axis * dz);
}

PlaneLocal RaySegment::restrict_plane(const Vec3& g, double offset) const {
    PlaneLocal pl;
    pl.e = -(dot(g, frame.origin) + offset);
    if (kind == CurveKind::linear) {
        pl.a_r = dot(g, direction);
        pl.a_z = 0.0;
    } else {
        pl.a_r = dot(g, frame.r_axis);
        pl.a_z = dot(g, frame.z_axis);
    }
    pl.parallel = pl.a_r == 0.0 && pl.a_z == 0.0;
    return pl;
}

std::optional<double> RaySegment::intersect_plane(const Vec3& g, double offset, double min_param,
                                                  Crossing crossing) const {
    const PlaneLocal pl = restrict_plane(g, offset);
    if (pl.parallel) return std::nullopt;
    std::optional<double> best;
    auto consider = [&](double p, double slope) {
        if (!(p > min_param) || !std::isfinite(p)) return;
        if (crossing == Crossing::decreasing ? !(slope < 0.0) : slope == 0.0) return;
        if (!best || p < *best) best = p;
    };
    switch (kind) {
        case CurveKind::linear: {
            // a_r s = e along the launch direction
            if (pl.a_r != 0.0) consider(pl.e / pl.a_r, pl.a_r);
            break;
        }
        case CurveKind::circular: {
            const double U = pl.a_r * sin0 - pl.a_z * cos0;
            const double V = pl.a_r * cos0 + pl.a_z * sin0;
            const double ek = pl.e * kappa;
            // (2U - e k) t^2 + 2V t - e k = 0 with t = tan(k s / 2). Roots are
            // carried with t / k so that k -> 0 stays finite.
            const double A = 2.0 * U - ek, B = 2.0 * V, C = -ek;
            // The parameter grows with t on [0, inf) and again on (-inf, 0),
            // so roots are ordered by (t < 0, t) and atan runs only until a
            // root passes min_param.
            struct Root {
                double t, t_over_k;
            };
            Root roots[2];
            int count = 0;
            auto take = [&](double t, double t_over_k) {
                const double slope = V * (1.0 - t * t) + 2.0 * U * t;
                if (crossing == Crossing::decreasing ? !(slope < 0.0) : slope == 0.0) return;
                roots[count++] = {t, t_over_k};
            };
            if (A == 0.0) {
                if (B != 0.0) take(-C / B, pl.e / B);
                // The other root sits at t = infinity: half a turn.
                consider(std::numbers::pi / kappa, -2.0 * U);
            } else {
                const double disc = B * B - 4.0 * A * C;
                if (disc >= 0.0) {
                    const double sq = std::sqrt(disc);
                    const double q = -0.5 * (B + (B >= 0.0 ? sq : -sq));
                    if (q == 0.0) {
                        take(0.0, 0.0);
                    } else {
                        take(q / A, q / (A * kappa));
                        take(C / q, -pl.e / q);
                    }
                }
            }
            if (count == 2) {
                const bool swap = (roots[0].t < 0.0) != (roots[1].t < 0.0) ? roots[0].t < 0.0 : roots[1].t < roots[0].t;
                if (swap) std::swap(roots[0], roots[1]);
            }
            for (int i = 0; i < count; ++i) {
                const double p = angle_param(roots[i].t, roots[i].t_over_k, kappa);
                if (p > min_param && std::isfinite(p)) {
                    if (!best || p < *best) best = p;
                    break;
                }
            }
            break;
        }
        case CurveKind::parabolic: {
            const double A = 0.25 * pl.a_z * alpha;
            const double B = pl.a_r * xi + pl.a_z * n0 * sin0;
            const double C = -pl.e;
            double roots[2];
            const int n = solve_quadratic(A, B, C, roots);
            for (int i = 0; i < n; ++i) {
                const double sg = roots[i];
                consider(sg, B + 2.0 * A * sg);
            }
            break;
        }
    }
    return best;
}

RaySegment make_linear_segment(const Vec3& origin, const Vec3& direction) {
    RaySegment s;
    s.kind = CurveKind::linear;
    s.direction = normalized(direction);
    s.frame.origin = origin;
    s.frame.r_axis = s.direction;
    s.frame.z_axis = any_perpendicular(s.direction);
    s.frame.normal = cross(s.frame.r_axis, s.frame.z_axis);
    s.cos0 = 1.0;
    s.sin0 = 0.0;
    s.theta0 = 0.0;
    return s;
}

RaySegment make_segment(const Vec3& origin, const Vec3& direction, const CellGradient& gradient, double m0,
                        Quantity quantity) {
    if (!(m0 > 0.0)) throw DomainError("make_segment: media value must be positive");
    if (quantity == Quantity::index)
        throw DomainError("make_segment: index-linear media has no closed-form curve; use speed or index squared");
    const Vec3 d = normalized(direction);
    RaySegment s = make_linear_segment(origin, d);
    s.m0 = m0;
    if (quantity == Quantity::index_squared) s.n0 = std::sqrt(m0);
    if (gradient.is_uniform) {
        s.xi = quantity == Quantity::speed ? 1.0 / m0 : s.n0;
        return s;
    }
    const Vec3 zhat = gradient.direction;
    const double dz = dot(d, zhat);
    const Vec3 horiz = d - zhat * dz;
    const double c = norm(horiz);
    s.alpha = gradient.alpha;
    s.sin0 = std::clamp(dz, -1.0, 1.0);
    s.cos0 = c;
    s.theta0 = std::atan2(s.sin0, s.cos0);
    s.frame.z_axis = zhat;
    if (c < kParallelCos) {
        // Straight ray along the gradient.
        s.frame.r_axis = any_perpendicular(zhat);
        s.frame.normal = cross(s.frame.r_axis, zhat);
        s.xi = 0.0;
        return s;
    }
    s.frame.r_axis = horiz / c;
    s.frame.normal = cross(s.frame.r_axis, zhat);
    if (quantity == Quantity::speed) {
        s.kind = CurveKind::circular;
        s.xi = s.cos0 / m0;
        s.kappa = s.alpha * s.xi;
    } else {
        s.kind = CurveKind::parabolic;
        s.xi = s.n0 * s.cos0;
    }
    return s;
}

}  // namespace curvedray
