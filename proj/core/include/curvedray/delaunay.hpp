#pragma once

#include <array>
#include <vector>

#include "curvedray/vec3.hpp"

namespace curvedray {

/// Delaunay tetrahedralization of a point set. Vertex ids index the input
/// array. neighbors[t][i] is the tet across the face opposite tets[t][i], or
/// -1 on the convex hull. Every tet is positively oriented.
struct Tetrahedralization {
    std::vector<std::array<int, 4>> tets;
    std::vector<std::array<int, 4>> neighbors;
    std::vector<int> duplicates;  // input ids skipped because they repeat a point
};

/// Incremental Bowyer-Watson insertion in Morton order with exact predicates.
/// Throws GeometryError when the input has fewer than four affinely
/// independent points.
Tetrahedralization delaunay_tetrahedralize(const std::vector<Vec3>& points);

/// Indices of `points` sorted along a Morton curve over their bounding box.
std::vector<int> morton_order(const std::vector<Vec3>& points);

}  // namespace curvedray
