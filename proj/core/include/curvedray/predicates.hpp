#pragma once

#include "curvedray/vec3.hpp"

namespace curvedray::predicates {

/// Sign of det[b - a; c - a; d - a]: positive when (a, b, c, d) is a
/// right-handed (positively oriented) tetrahedron. Exact for all double
/// inputs; a floating-point filter answers the easy cases and expansion
/// arithmetic resolves the rest.
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Positive when `e` lies strictly inside the circumsphere of the positively
/// oriented tetrahedron (a, b, c, d), negative when strictly outside, zero
/// when cospherical. Exact.
int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e);

/// Floating-point orientation determinant (6 x signed volume), unfiltered.
double orient3d_value(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Number of calls that fell through to exact arithmetic since start-up.
/// Exposed for diagnostics and tests only.
long long exact_fallback_count();

}  // namespace curvedray::predicates
