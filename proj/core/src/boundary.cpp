#include "curvedray/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "curvedray/error.hpp"

namespace curvedray {

BoundaryScene read_scene(std::istream& is) {
    std::string line;
    int lineno = 0;
    bool header = false;
    BoundaryScene scene;
    while (std::getline(is, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        const std::string where = "scene line " + std::to_string(lineno) + ": ";
        if (!header) {
            int version = 0;
            if (tag != "curvedray-scene" || !(ls >> version)) throw FormatError(where + "missing header");
            if (version != 1) throw VersionError(where + "unsupported version " + std::to_string(version));
            header = true;
            continue;
        }
        if (tag == "tri") {
            SceneTriangle t;
            for (auto& v : t.v)
                if (!(ls >> v.x >> v.y >> v.z)) throw FormatError(where + "expected 9 coordinates");
            if (!(ls >> t.surface_id)) throw FormatError(where + "expected surface id");
            if (!(t.area() > 0.0)) throw FormatError(where + "degenerate triangle");
            scene.triangles.push_back(t);
        } else if (tag == "material") {
            int id = 0;
            std::string kind;
            if (!(ls >> id >> kind)) throw FormatError(where + "expected 'material id kind'");
            if (kind == "reflective") scene.reflective[id] = true;
            else if (kind == "absorbing") scene.reflective[id] = false;
            else throw FormatError(where + "unknown material '" + kind + "'");
        } else {
            throw FormatError(where + "unknown record '" + tag + "'");
        }
    }
    if (!header) throw FormatError("scene: missing header");
    return scene;
}

BoundaryScene read_scene(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path.string() + "'");
    return read_scene(is);
}

void write_scene(const BoundaryScene& scene, std::ostream& os) {
    os << "curvedray-scene 1\n" << std::setprecision(17);
    for (const auto& [id, refl] : scene.reflective)
        os << "material " << id << ' ' << (refl ? "reflective" : "absorbing") << '\n';
    for (const auto& t : scene.triangles) {
        os << "tri";
        for (const auto& v : t.v) os << ' ' << v.x << ' ' << v.y << ' ' << v.z;
        os << ' ' << t.surface_id << '\n';
    }
    if (!os) throw IoError("scene: write failed");
}

void write_scene(const BoundaryScene& scene, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
    write_scene(scene, os);
}

bool triangle_tet_overlap(const SceneTriangle& tri, const std::array<Vec3, 4>& tet, double tol) {
    auto separated = [&](const Vec3& axis) {
        const double len = norm(axis);
        if (len < 1e-300) return false;
        const Vec3 a = axis / len;
        double t0 = dot(tri.v[0], a), t1 = t0;
        for (int i = 1; i < 3; ++i) {
            const double d = dot(tri.v[i], a);
            t0 = std::min(t0, d);
            t1 = std::max(t1, d);
        }
        double q0 = dot(tet[0], a), q1 = q0;
        for (int i = 1; i < 4; ++i) {
            const double d = dot(tet[i], a);
            q0 = std::min(q0, d);
            q1 = std::max(q1, d);
        }
        return t1 < q0 - tol || q1 < t0 - tol;
    };
    const Vec3 te[3] = {tri.v[1] - tri.v[0], tri.v[2] - tri.v[1], tri.v[0] - tri.v[2]};
    if (separated(cross(te[0], te[1]))) return false;
    static const int faces[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
    for (const auto& f : faces)
        if (separated(cross(tet[f[1]] - tet[f[0]], tet[f[2]] - tet[f[0]]))) return false;
    static const int edges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    for (const auto& e : te)
        for (const auto& q : edges)
            if (separated(cross(e, tet[q[1]] - tet[q[0]]))) return false;
    return true;
}

bool point_in_triangle(const Vec3& p, const SceneTriangle& tri, double tol) {
    const Vec3 e0 = tri.v[1] - tri.v[0], e1 = tri.v[2] - tri.v[0], w = p - tri.v[0];
    const double d00 = dot(e0, e0), d01 = dot(e0, e1), d11 = dot(e1, e1);
    const double d20 = dot(w, e0), d21 = dot(w, e1);
    const double den = d00 * d11 - d01 * d01;
    if (!(den > 0.0)) return false;
    const double b1 = (d11 * d20 - d01 * d21) / den;
    const double b2 = (d00 * d21 - d01 * d20) / den;
    return b1 >= -tol && b2 >= -tol && 1.0 - b1 - b2 >= -tol;
}

BoundaryScene make_ground_plane(const Box3& box, double height, int surface_id, bool reflective) {
    BoundaryScene s;
    const Vec3 a{box.lo.x, box.lo.y, height}, b{box.hi.x, box.lo.y, height};
    const Vec3 c{box.hi.x, box.hi.y, height}, d{box.lo.x, box.hi.y, height};
    s.triangles.push_back({{a, b, c}, surface_id});
    s.triangles.push_back({{a, c, d}, surface_id});
    s.reflective[surface_id] = reflective;
    return s;
}

}  // namespace curvedray
