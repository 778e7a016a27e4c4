#pragma once

#include <optional>
#include <vector>

#include "curvedray/adaptive_mesh.hpp"

namespace curvedray {

/// Weighted least-squares system around one cell: offsets of neighbour
/// centroids from the cell centroid, value differences, and weights.
struct RegressionStencil {
    std::vector<Vec3> dx;
    std::vector<double> dm;
    std::vector<double> w;
};

/// Mean of the four vertex values, i.e. the interpolated value at the centroid.
double cell_value(const AdaptiveMesh& mesh, int t);

/// Face neighbours, padded on the hull with vertex-adjacent cells (closest
/// centroid first) until at least four equations exist. Weights are inverse
/// centroid distances.
RegressionStencil regression_stencil(const AdaptiveMesh& mesh, int t);

/// Explicit QR-factor solution of the weighted normal equations. Returns
/// nullopt when the stencil is rank deficient.
std::optional<Vec3> solve_regression(const RegressionStencil& s);

/// Regression gradient; falls back to Green-Gauss (flagged) when the
/// stencil is rank deficient.
CellGradient regression_gradient(const AdaptiveMesh& mesh, int t);

/// Surface-integral gradient of the vertex-linear field:
/// -(1 / 3T) sum_k A_k m_k N_k with outward face normals N_k.
CellGradient green_gauss_gradient(const AdaptiveMesh& mesh, int t);

/// Fill every cell's gradient and record the method on the mesh.
void bake_gradients(AdaptiveMesh& mesh, GradientMethod method);

}  // namespace curvedray
