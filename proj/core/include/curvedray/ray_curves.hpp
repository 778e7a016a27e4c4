#pragma once

#include <optional>
#include <string_view>

#include "curvedray/adaptive_mesh.hpp"
#include "curvedray/vec3.hpp"

namespace curvedray {

enum class CurveKind { linear, circular, parabolic };

std::string_view curve_kind_name(CurveKind k);

/// Local frame of the ray plane. z_axis follows the media gradient, r_axis
/// is the in-plane horizontal with the launch direction's r-component >= 0.
struct RayPlaneFrame {
    Vec3 origin;
    Vec3 z_axis{0, 0, 1};
    Vec3 r_axis{1, 0, 0};
    Vec3 normal{0, -1, 0};

    Vec3 to_world(double r, double z) const { return origin + r_axis * r + z_axis * z; }
};

/// A plane g . x + offset = 0 restricted to the ray plane: a_r r + a_z z = e.
struct PlaneLocal {
    double a_r = 0.0;
    double a_z = 0.0;
    double e = 0.0;
    bool parallel = false;
};

/// Which sign changes of the plane function count as a crossing.
enum class Crossing { any, decreasing };

/// One analytic ray piece. The curve parameter is arc length for linear and
/// circular kinds, and the ray parameter sigma (ds = n dsigma) for the
/// parabolic kind.
///
/// circular (c = c0 + alpha z):  kappa = alpha cos(theta0) / c0,
///     r(s) = [sin0 (1 - cos ks) + cos0 sin ks] / k
///     z(s) = [sin0 sin ks - cos0 (1 - cos ks)] / k
/// parabolic (n^2 = n0^2 + alpha z):  xi = n0 cos(theta0),
///     r(sigma) = xi sigma,  z(sigma) = n0 sin0 sigma + alpha sigma^2 / 4
struct RaySegment {
    RayPlaneFrame frame;
    CurveKind kind = CurveKind::linear;
    double alpha = 0.0;     // |grad m| in the mesh quantity
    double m0 = 0.0;        // c0 (circular) or n0^2 (parabolic) at the origin
    double xi = 0.0;        // Snell constant: cos0/c0 or n0 cos0
    double theta0 = 0.0;    // launch angle from r_axis toward z_axis
    double cos0 = 1.0;
    double sin0 = 0.0;
    double kappa = 0.0;     // curvature, circular only
    double n0 = 1.0;        // parabolic only
    Vec3 direction;         // launch direction in world coordinates
    double param_end = 0.0;
    double travel_length = 0.0;

    /// (r, z) in the ray plane.
    std::pair<double, double> local(double param) const;
    Vec3 point(double param) const;
    /// Unit tangent at a parameter value.
    Vec3 tangent_at(double param) const;
    /// Arc length between two parameter values (p1 >= p0).
    double arc_length(double p0, double p1) const;
    double arc_length(double param) const { return arc_length(0.0, param); }
    /// Parameter units per meter of arc at the origin, used to scale
    /// length tolerances into parameter tolerances.
    double param_per_length() const { return kind == CurveKind::parabolic ? 1.0 / n0 : 1.0; }

    /// Height z* where the ray becomes horizontal, if ahead of the origin.
    std::optional<double> turning_point() const;
    /// Parameter at which the turning point is reached, if ahead.
    std::optional<double> turning_param() const;

    /// r on the initial (pre-turning-point) branch as a function of z.
    /// Throws DomainError beyond the turning point or behind the origin.
    double eval_r(double z) const;
    /// World tangent on the initial branch at height z. At the turning
    /// point returns the in-plane horizontal direction.
    Vec3 tangent(double z) const;

    PlaneLocal restrict_plane(const Vec3& g, double offset) const;

    /// Smallest parameter > min_param where g . x + offset changes sign in
    /// the requested way, in closed form.
    std::optional<double> intersect_plane(const Vec3& g, double offset, double min_param,
                                          Crossing crossing = Crossing::decreasing) const;
};

/// Build a segment from the launch state and the local cell gradient.
/// `quantity` selects the curve family: speed gives circles, index squared
/// gives parabolas. `m0` is the media value at the origin in that quantity.
/// Uniform cells, and launches within 1e-12 of the gradient direction, give
/// straight segments.
RaySegment make_segment(const Vec3& origin, const Vec3& direction, const CellGradient& gradient, double m0,
                        Quantity quantity);

/// Straight segment regardless of media.
RaySegment make_linear_segment(const Vec3& origin, const Vec3& direction);

}  // namespace curvedray
