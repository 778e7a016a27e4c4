#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include "curvedray/vec3.hpp"

namespace curvedray {

struct SceneTriangle {
    std::array<Vec3, 3> v;
    int surface_id = 0;

    Vec3 normal() const { return normalized(cross(v[1] - v[0], v[2] - v[0])); }
    double area() const { return 0.5 * norm(cross(v[1] - v[0], v[2] - v[0])); }
};

/// Triangle soup of obstacle and ground surfaces.
struct BoundaryScene {
    std::vector<SceneTriangle> triangles;
    std::map<int, bool> reflective;  // surface id -> reflective; absent ids reflect

    bool is_reflective(int surface_id) const {
        auto it = reflective.find(surface_id);
        return it == reflective.end() || it->second;
    }
    bool empty() const { return triangles.empty(); }
};

// Scene file, text:
//   curvedray-scene 1
//   tri x0 y0 z0 x1 y1 z1 x2 y2 z2 surface_id
//   material surface_id reflective|absorbing
// Blank lines and lines starting with '#' are ignored.
BoundaryScene read_scene(const std::filesystem::path& path);
BoundaryScene read_scene(std::istream& is);
void write_scene(const BoundaryScene& scene, const std::filesystem::path& path);
void write_scene(const BoundaryScene& scene, std::ostream& os);

/// Separating-axis test between a triangle and a tetrahedron. Touching
/// counts as overlap; `tol` widens every interval so the test errs toward
/// reporting overlap.
bool triangle_tet_overlap(const SceneTriangle& tri, const std::array<Vec3, 4>& tet, double tol);

/// Whether `p`, assumed to lie in the triangle's plane, is inside the
/// triangle with barycentric slack `tol`.
bool point_in_triangle(const Vec3& p, const SceneTriangle& tri, double tol);

/// Two-triangle rectangle z = height spanning [lo.x, hi.x] x [lo.y, hi.y],
/// normals pointing up.
BoundaryScene make_ground_plane(const Box3& box, double height, int surface_id = 0, bool reflective = true);

}  // namespace curvedray
