#pragma once

#include <array>
#include <span>
#include <vector>

#include "curvedray/boundary.hpp"
#include "curvedray/media_grid.hpp"
#include "curvedray/resample.hpp"

namespace curvedray {

enum class GradientMethod { none, regression, green_gauss };

std::string_view gradient_method_name(GradientMethod m);
GradientMethod parse_gradient_method(std::string_view name);

/// Below this gradient magnitude (per meter) a cell is treated as uniform.
inline constexpr double kAlphaEpsilon = 1e-12;

struct CellGradient {
    Vec3 grad;          // gradient of the mesh quantity
    double alpha = 0.0; // |grad|
    Vec3 direction;     // grad / alpha, zero when uniform
    bool is_uniform = true;
    bool fallback = false;  // regression was rank deficient; Green-Gauss used

    static CellGradient from(const Vec3& g, bool fallback = false);
};

/// lambda_i(x) = g[i] . x + o[i] is the barycentric coordinate of vertex i.
struct BaryPlanes {
    std::array<Vec3, 4> g;
    std::array<double, 4> o;

    double eval(int i, const Vec3& x) const { return dot(g[i], x) + o[i]; }
};

/// Tetrahedral mesh of resampled media points. tets[t][i] are vertex ids;
/// neighbors[t][i] is the tet across the face opposite vertex i, or -1 on
/// the hull. Every tet is positively oriented.
class AdaptiveMesh {
public:
    static constexpr double kBaryEpsilon = 1e-9;

    Quantity quantity = Quantity::speed;
    double reference_speed = 340.0;
    std::vector<SamplePoint> vertices;
    std::vector<std::array<int, 4>> tets;
    std::vector<std::array<int, 4>> neighbors;
    std::vector<CellGradient> gradients;
    GradientMethod gradient_method = GradientMethod::none;
    BoundaryScene scene;
    std::vector<int> link_offsets{0};  // CSR over tets into link_ids
    std::vector<int> link_ids;         // scene triangle indices

    /// Recompute per-tet barycentric planes and the bounding box. Throws
    /// GeometryError for a tet with non-positive volume.
    void rebuild_geometry();

    std::size_t tet_count() const { return tets.size(); }
    const Box3& bounds() const { return bounds_; }
    const BaryPlanes& planes(int t) const { return planes_[t]; }

    const Vec3& position(int v) const { return vertices[v].position; }
    std::array<Vec3, 4> tet_vertices(int t) const;
    double volume(int t) const;
    Vec3 centroid(int t) const;
    /// Circumradius over shortest edge.
    double radius_edge_ratio(int t) const;
    double diameter(int t) const { return diameters_[t]; }

    std::array<double, 4> barycentric(int t, const Vec3& x) const;
    bool contains(int t, const Vec3& x, double eps = kBaryEpsilon) const;

    /// Unit outward normal of face i (opposite vertex i).
    Vec3 outward_normal(int t, int face) const;

    /// Tet whose barycentric coordinates of x are all >= -eps. Walks from
    /// `hint` when valid, otherwise from a deterministic sampled start, and
    /// falls back to a full scan. Throws OutsideDomainError off the hull.
    int locate(const Vec3& x, int hint = -1) const;

    /// Like locate, but among all tets containing x returns the smallest
    /// index, so the answer does not depend on the hint.
    int locate_canonical(const Vec3& x, int hint = -1) const;

    double interpolate(int t, const Vec3& x) const;

    std::span<const int> linked(int t) const {
        if (link_offsets.size() != tets.size() + 1) return {};
        return {link_ids.data() + link_offsets[t], link_ids.data() + link_offsets[t + 1]};
    }

    /// Neighbour symmetry and positive orientation; throws GeometryError.
    void validate() const;

private:
    std::vector<BaryPlanes> planes_;
    std::vector<double> diameters_;
    Box3 bounds_;

    int walk(const Vec3& x, int start) const;
    int sampled_start(const Vec3& x) const;
};

/// Delaunay-tetrahedralize sample points. Duplicate positions are dropped.
AdaptiveMesh tetrahedralize(std::vector<SamplePoint> points, Quantity quantity, double reference_speed);

struct MeshBuildReport {
    ResampleStats resample;
    std::size_t vertices = 0;
    std::size_t tets = 0;
    double d_min = 0.0;
    double d_max = 0.0;
    double max_radius_edge = 0.0;
};

/// Spacing field, FCC resampling, box corners, then tetrahedralization.
/// Vertex values are stored in `mesh_quantity`.
AdaptiveMesh build_adaptive_mesh(const MediaGrid& grid, const ResampleParams& params, Quantity mesh_quantity,
                                 MeshBuildReport* report = nullptr);

/// Fill linked faces for every (tet, triangle) overlap. Returns the number
/// of triangles that touch no tet and were ignored.
std::size_t link_boundary(AdaptiveMesh& mesh, BoundaryScene scene);

}  // namespace curvedray
