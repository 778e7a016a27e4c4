#include "curvedray/adaptive_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "curvedray/delaunay.hpp"
#include "curvedray/error.hpp"

namespace curvedray {

std::string_view gradient_method_name(GradientMethod m) {
    switch (m) {
        case GradientMethod::none: return "none";
        case GradientMethod::regression: return "regression";
        case GradientMethod::green_gauss: return "green-gauss";
    }
    return "none";
}

GradientMethod parse_gradient_method(std::string_view name) {
    if (name == "none") return GradientMethod::none;
    if (name == "regression" || name == "lsq") return GradientMethod::regression;
    if (name == "green-gauss" || name == "green_gauss" || name == "gg") return GradientMethod::green_gauss;
    throw FormatError("unknown gradient method '" + std::string(name) + "'");
}

CellGradient CellGradient::from(const Vec3& g, bool fallback) {
    CellGradient c;
    c.grad = g;
    c.alpha = norm(g);
    c.is_uniform = !(c.alpha >= kAlphaEpsilon);
    c.direction = c.is_uniform ? Vec3{} : g / c.alpha;
    c.fallback = fallback;
    return c;
}

void AdaptiveMesh::rebuild_geometry() {
    planes_.resize(tets.size());
    diameters_.resize(tets.size());
    for (std::size_t t = 0; t < tets.size(); ++t) {
        const auto p = tet_vertices(static_cast<int>(t));
        double d2 = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) d2 = std::max(d2, norm2(p[i] - p[j]));
        diameters_[t] = std::sqrt(d2);
        const Vec3 e1 = p[1] - p[0], e2 = p[2] - p[0], e3 = p[3] - p[0];
        const double det = dot(e1, cross(e2, e3));
        if (!(det > 0.0)) throw GeometryError("mesh: tet " + std::to_string(t) + " has non-positive volume");
        BaryPlanes& bp = planes_[t];
        bp.g[1] = cross(e2, e3) / det;
        bp.g[2] = cross(e3, e1) / det;
        bp.g[3] = cross(e1, e2) / det;
        bp.g[0] = -(bp.g[1] + bp.g[2] + bp.g[3]);
        for (int i = 1; i < 4; ++i) bp.o[i] = -dot(bp.g[i], p[0]);
        bp.o[0] = 1.0 - bp.o[1] - bp.o[2] - bp.o[3];
    }
    if (vertices.empty()) {
        bounds_ = {};
    } else {
        bounds_ = {vertices[0].position, vertices[0].position};
        for (const auto& v : vertices) {
            bounds_.lo = component_min(bounds_.lo, v.position);
            bounds_.hi = component_max(bounds_.hi, v.position);
        }
    }
}

std::array<Vec3, 4> AdaptiveMesh::tet_vertices(int t) const {
    const auto& v = tets[t];
    return {position(v[0]), position(v[1]), position(v[2]), position(v[3])};
}

double AdaptiveMesh::volume(int t) const {
    const auto p = tet_vertices(t);
    return dot(p[1] - p[0], cross(p[2] - p[0], p[3] - p[0])) / 6.0;
}

Vec3 AdaptiveMesh::centroid(int t) const {
    const auto p = tet_vertices(t);
    return (p[0] + p[1] + p[2] + p[3]) * 0.25;
}

std::array<double, 4> AdaptiveMesh::barycentric(int t, const Vec3& x) const {
    const auto& bp = planes_[t];
    return {bp.eval(0, x), bp.eval(1, x), bp.eval(2, x), bp.eval(3, x)};
}

bool AdaptiveMesh::contains(int t, const Vec3& x, double eps) const {
    const auto& bp = planes_[t];
    for (int i = 0; i < 4; ++i)
        if (bp.eval(i, x) < -eps) return false;
    return true;
}

Vec3 AdaptiveMesh::outward_normal(int t, int face) const { return -normalized(planes_[t].g[face]); }

double AdaptiveMesh::radius_edge_ratio(int t) const {
    const auto p = tet_vertices(t);
    const Vec3 a = p[1] - p[0], b = p[2] - p[0], c = p[3] - p[0];
    const double det = 2.0 * dot(a, cross(b, c));
    const Vec3 centre = (cross(b, c) * norm2(a) + cross(c, a) * norm2(b) + cross(a, b) * norm2(c)) / det;
    double shortest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) shortest = std::min(shortest, distance(p[i], p[j]));
    return norm(centre) / shortest;
}

double AdaptiveMesh::interpolate(int t, const Vec3& x) const {
    const auto& bp = planes_[t];
    const auto& v = tets[t];
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += bp.eval(i, x) * vertices[v[i]].value;
    return s;
}

int AdaptiveMesh::sampled_start(const Vec3& x) const {
    const std::size_t n = tets.size();
    const std::size_t samples = static_cast<std::size_t>(std::cbrt(static_cast<double>(n))) + 1;
    const std::size_t stride = std::max<std::size_t>(1, n / samples);
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t t = (stride * 7) / 13 % n; t < n; t += stride) {
        const double d = norm2(centroid(static_cast<int>(t)) - x);
        if (d < best_d) { best_d = d; best = static_cast<int>(t); }
    }
    return best;
}

int AdaptiveMesh::walk(const Vec3& x, int t) const {
    const std::size_t max_steps = 64 + 4 * static_cast<std::size_t>(std::cbrt(static_cast<double>(tets.size()))) * 16;
    for (std::size_t step = 0; step < max_steps; ++step) {
        const auto& bp = planes_[t];
        int worst = -1;
        double worst_v = -kBaryEpsilon;
        for (int i = 0; i < 4; ++i) {
            const double l = bp.eval(i, x);
            if (l < worst_v) { worst_v = l; worst = i; }
        }
        if (worst < 0) return t;
        const int nb = neighbors[t][worst];
        if (nb < 0) return -1;
        t = nb;
    }
    return -1;
}

int AdaptiveMesh::locate(const Vec3& x, int hint) const {
    if (tets.empty()) throw OutsideDomainError("locate: empty mesh");
    const int start = (hint >= 0 && static_cast<std::size_t>(hint) < tets.size()) ? hint : sampled_start(x);
    const int t = walk(x, start);
    if (t >= 0) return t;
    for (std::size_t i = 0; i < tets.size(); ++i)
        if (contains(static_cast<int>(i), x)) return static_cast<int>(i);
    throw OutsideDomainError("point lies outside the mesh");
}

int AdaptiveMesh::locate_canonical(const Vec3& x, int hint) const {
    const int t0 = locate(x, hint);
    int best = t0;
    std::vector<int> stack{t0}, seen{t0};
    while (!stack.empty()) {
        const int t = stack.back();
        stack.pop_back();
        for (int nb : neighbors[t]) {
            if (nb < 0 || std::find(seen.begin(), seen.end(), nb) != seen.end()) continue;
            seen.push_back(nb);
            if (!contains(nb, x)) continue;
            best = std::min(best, nb);
            stack.push_back(nb);
        }
    }
    return best;
}

void AdaptiveMesh::validate() const {
    if (neighbors.size() != tets.size()) throw GeometryError("mesh: neighbour table size mismatch");
    for (std::size_t t = 0; t < tets.size(); ++t) {
        if (!(volume(static_cast<int>(t)) > 0.0)) throw GeometryError("mesh: non-positive tet volume");
        for (int i = 0; i < 4; ++i) {
            const int nb = neighbors[t][i];
            if (nb < 0) continue;
            int back = 0;
            for (int k = 0; k < 4; ++k) back += neighbors[nb][k] == static_cast<int>(t);
            if (back != 1) throw GeometryError("mesh: asymmetric neighbour record");
            // Shared face must hold the same three vertices.
            int shared = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    if (a != i && tets[t][a] == tets[nb][b]) ++shared;
            if (shared != 3) throw GeometryError("mesh: neighbours do not share a face");
        }
    }
}

AdaptiveMesh tetrahedralize(std::vector<SamplePoint> points, Quantity quantity, double reference_speed) {
    std::vector<Vec3> pos(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) pos[i] = points[i].position;
    const Tetrahedralization dt = delaunay_tetrahedralize(pos);

    // Vertices and tets are stored along a Morton curve so that walks touch
    // nearby memory.
    std::vector<char> dup(points.size(), 0);
    for (int d : dt.duplicates) dup[d] = 1;
    std::vector<int> remap(points.size(), -1);
    AdaptiveMesh mesh;
    mesh.quantity = quantity;
    mesh.reference_speed = reference_speed;
    for (int i : morton_order(pos)) {
        if (dup[i]) continue;
        remap[i] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(points[i]);
    }
    std::vector<Vec3> centroids(dt.tets.size());
    for (std::size_t t = 0; t < dt.tets.size(); ++t) {
        const auto& v = dt.tets[t];
        centroids[t] = (pos[v[0]] + pos[v[1]] + pos[v[2]] + pos[v[3]]) * 0.25;
    }
    const std::vector<int> tet_order = morton_order(centroids);
    std::vector<int> tet_remap(dt.tets.size());
    for (std::size_t k = 0; k < tet_order.size(); ++k) tet_remap[tet_order[k]] = static_cast<int>(k);
    mesh.tets.reserve(dt.tets.size());
    mesh.neighbors.reserve(dt.tets.size());
    for (int t : tet_order) {
        const auto& v = dt.tets[t];
        mesh.tets.push_back({remap[v[0]], remap[v[1]], remap[v[2]], remap[v[3]]});
        std::array<int, 4> nb = dt.neighbors[t];
        for (int& n : nb)
            if (n >= 0) n = tet_remap[n];
        mesh.neighbors.push_back(nb);
    }
    mesh.link_offsets.assign(mesh.tets.size() + 1, 0);
    mesh.rebuild_geometry();
    return mesh;
}

AdaptiveMesh build_adaptive_mesh(const MediaGrid& grid, const ResampleParams& params, Quantity mesh_quantity,
                                 MeshBuildReport* report) {
    const std::vector<double> spacing = compute_spacing_field(grid, params);
    ResampleStats stats;
    std::vector<SamplePoint> samples = resample_fcc(grid, spacing, params, mesh_quantity, &stats);
    add_box_corners(grid, spacing, mesh_quantity, samples);
    AdaptiveMesh mesh = tetrahedralize(std::move(samples), mesh_quantity, grid.reference_speed);
    if (report) {
        report->resample = stats;
        report->vertices = mesh.vertices.size();
        report->tets = mesh.tets.size();
        report->d_min = effective_d_min(grid, params);
        report->d_max = effective_d_max(grid, params);
        for (std::size_t t = 0; t < mesh.tets.size(); ++t)
            report->max_radius_edge = std::max(report->max_radius_edge, mesh.radius_edge_ratio(static_cast<int>(t)));
    }
    return mesh;
}

std::size_t link_boundary(AdaptiveMesh& mesh, BoundaryScene scene) {
    const std::size_t nt = mesh.tets.size();
    std::vector<std::vector<int>> per_tet(nt);
    std::size_t ignored = 0;
    const double scale = std::max(mesh.bounds().diagonal(), 1e-300);
    const double tol = 1e-9 * scale;
    // Per-tet boxes once, then a plain sweep per triangle.
    std::vector<Box3> boxes(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto p = mesh.tet_vertices(static_cast<int>(t));
        boxes[t] = {p[0], p[0]};
        for (int i = 1; i < 4; ++i) {
            boxes[t].lo = component_min(boxes[t].lo, p[i]);
            boxes[t].hi = component_max(boxes[t].hi, p[i]);
        }
    }
    for (std::size_t k = 0; k < scene.triangles.size(); ++k) {
        const SceneTriangle& tri = scene.triangles[k];
        Box3 tb{tri.v[0], tri.v[0]};
        for (int i = 1; i < 3; ++i) {
            tb.lo = component_min(tb.lo, tri.v[i]);
            tb.hi = component_max(tb.hi, tri.v[i]);
        }
        bool any = false;
        for (std::size_t t = 0; t < nt; ++t) {
            const Box3& b = boxes[t];
            if (b.hi.x < tb.lo.x - tol || tb.hi.x < b.lo.x - tol || b.hi.y < tb.lo.y - tol ||
                tb.hi.y < b.lo.y - tol || b.hi.z < tb.lo.z - tol || tb.hi.z < b.lo.z - tol)
                continue;
            if (!triangle_tet_overlap(tri, mesh.tet_vertices(static_cast<int>(t)), tol)) continue;
            per_tet[t].push_back(static_cast<int>(k));
            any = true;
        }
        if (!any) ++ignored;
    }
    mesh.link_offsets.assign(nt + 1, 0);
    mesh.link_ids.clear();
    for (std::size_t t = 0; t < nt; ++t) {
        mesh.link_ids.insert(mesh.link_ids.end(), per_tet[t].begin(), per_tet[t].end());
        mesh.link_offsets[t + 1] = static_cast<int>(mesh.link_ids.size());
    }
    mesh.scene = std::move(scene);
    return ignored;
}

}  // namespace curvedray
