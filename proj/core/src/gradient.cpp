#include "curvedray/gradient.hpp"

#include <algorithm>
#include <cmath>

#include "curvedray/error.hpp"

namespace curvedray {

double cell_value(const AdaptiveMesh& mesh, int t) {
    const auto& v = mesh.tets[t];
    return 0.25 * (mesh.vertices[v[0]].value + mesh.vertices[v[1]].value + mesh.vertices[v[2]].value +
                   mesh.vertices[v[3]].value);
}

namespace {

// Cells sharing at least one vertex with t, found by walking face links
// around each vertex.
std::vector<int> vertex_adjacent(const AdaptiveMesh& mesh, int t) {
    std::vector<int> out;
    for (int vid : mesh.tets[t]) {
        std::vector<int> stack{t}, seen{t};
        while (!stack.empty()) {
            const int c = stack.back();
            stack.pop_back();
            for (int i = 0; i < 4; ++i) {
                if (mesh.tets[c][i] == vid) continue;  // face opposite vid does not contain it
                const int nb = mesh.neighbors[c][i];
                if (nb < 0 || std::find(seen.begin(), seen.end(), nb) != seen.end()) continue;
                seen.push_back(nb);
                stack.push_back(nb);
            }
        }
        for (int c : seen)
            if (c != t && std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    return out;
}

}  // namespace

RegressionStencil regression_stencil(const AdaptiveMesh& mesh, int t) {
    const Vec3 x0 = mesh.centroid(t);
    const double m0 = cell_value(mesh, t);
    std::vector<int> cells;
    for (int nb : mesh.neighbors[t])
        if (nb >= 0) cells.push_back(nb);
    if (cells.size() < 4) {
        std::vector<int> extra;
        for (int c : vertex_adjacent(mesh, t))
            if (std::find(cells.begin(), cells.end(), c) == cells.end()) extra.push_back(c);
        std::stable_sort(extra.begin(), extra.end(), [&](int a, int b) {
            const double da = norm2(mesh.centroid(a) - x0), db = norm2(mesh.centroid(b) - x0);
            return da < db || (da == db && a < b);
        });
        for (int c : extra) {
            if (cells.size() >= 4) break;
            cells.push_back(c);
        }
    }
    RegressionStencil s;
    for (int c : cells) {
        const Vec3 d = mesh.centroid(c) - x0;
        s.dx.push_back(d);
        s.dm.push_back(cell_value(mesh, c) - m0);
        s.w.push_back(1.0 / norm(d));
    }
    return s;
}

std::optional<Vec3> solve_regression(const RegressionStencil& s) {
    const std::size_t n = s.dx.size();
    if (n < 3) return std::nullopt;
    double sxx = 0, sxy = 0, sxz = 0, syy = 0, syz = 0, szz = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3& d = s.dx[k];
        const double w = s.w[k];
        sxx += w * d.x * d.x;
        sxy += w * d.x * d.y;
        sxz += w * d.x * d.z;
        syy += w * d.y * d.y;
        syz += w * d.y * d.z;
        szz += w * d.z * d.z;
    }
    const double scale = sxx + syy + szz;
    const double floor = 1e-12 * scale;
    if (!(sxx > floor)) return std::nullopt;
    const double r11 = std::sqrt(sxx);
    const double r12 = sxy / r11;
    const double r13 = sxz / r11;
    const double r22sq = syy - r12 * r12;
    if (!(r22sq > floor)) return std::nullopt;
    const double r22 = std::sqrt(r22sq);
    const double r23 = (syz - r12 / r11 * sxz) / r22;
    const double r33sq = szz - (r13 * r13 + r23 * r23);
    if (!(r33sq > floor)) return std::nullopt;
    const double r33 = std::sqrt(r33sq);
    const double beta = (r12 * r23 - r13 * r22) / (r11 * r22);

    Vec3 g;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3& d = s.dx[k];
        const double a1 = d.x / (r11 * r11);
        const double a2 = (d.y - r12 / r11 * d.x) / (r22 * r22);
        const double a3 = (d.z - r23 / r22 * d.y + beta * d.x) / (r33 * r33);
        const Vec3 p{a1 - r12 / r11 * a2 + beta * a3, a2 - r23 / r22 * a3, a3};
        g += p * (s.w[k] * s.dm[k]);
    }
    return g;
}

CellGradient green_gauss_gradient(const AdaptiveMesh& mesh, int t) {
    const double vol = mesh.volume(t);
    if (!(vol > 0.0)) throw GeometryError("green_gauss_gradient: zero-volume tet");
    const auto p = mesh.tet_vertices(t);
    static const int faces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
    Vec3 g;
    for (int k = 0; k < 4; ++k) {
        const auto& f = faces[k];
        const Vec3 an = 0.5 * cross(p[f[1]] - p[f[0]], p[f[2]] - p[f[0]]);  // A_k N_k, outward
        g += an * mesh.vertices[mesh.tets[t][k]].value;
    }
    return CellGradient::from(g * (-1.0 / (3.0 * vol)));
}

CellGradient regression_gradient(const AdaptiveMesh& mesh, int t) {
    const auto g = solve_regression(regression_stencil(mesh, t));
    if (!g) {
        CellGradient c = green_gauss_gradient(mesh, t);
        c.fallback = true;
        return c;
    }
    return CellGradient::from(*g);
}

void bake_gradients(AdaptiveMesh& mesh, GradientMethod method) {
    mesh.gradients.assign(mesh.tets.size(), CellGradient{});
    for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
        const int ti = static_cast<int>(t);
        switch (method) {
            case GradientMethod::regression: mesh.gradients[t] = regression_gradient(mesh, ti); break;
            case GradientMethod::green_gauss: mesh.gradients[t] = green_gauss_gradient(mesh, ti); break;
            case GradientMethod::none: break;
        }
    }
    mesh.gradient_method = method;
}

}  // namespace curvedray
