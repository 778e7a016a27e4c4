#include "curvedray/traversal.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "curvedray/error.hpp"

namespace curvedray {

std::string_view termination_name(Termination t) {
    switch (t) {
        case Termination::exited: return "exited";
        case Termination::max_depth: return "max_depth";
        case Termination::max_travel: return "max_travel";
        case Termination::trapped: return "trapped";
        case Termination::absorbed: return "absorbed";
    }
    return "trapped";
}

std::vector<int> PropagationPath::cell_sequence() const {
    std::vector<int> cells;
    for (const auto& s : segments)
        if (cells.empty() || cells.back() != s.cell) cells.push_back(s.cell);
    return cells;
}

std::vector<Vec3> PropagationPath::polyline(int samples) const {
    std::vector<Vec3> pts;
    if (segments.empty()) {
        pts.push_back(origin);
        return pts;
    }
    pts.push_back(segments.front().entry);
    for (const auto& s : segments) {
        for (int k = 1; k <= samples; ++k) pts.push_back(s.curve.point(s.curve.param_end * k / (samples + 1)));
        pts.push_back(s.exit);
    }
    return pts;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Parameter at which the segment has covered `length` meters.
double param_at_length(const RaySegment& seg, double length, double upper) {
    if (seg.kind != CurveKind::parabolic) return length;
    double lo = 0.0, hi = upper;
    double p = length / seg.n0;
    for (int it = 0; it < 60; ++it) {
        const double f = seg.arc_length(p) - length;
        if (f > 0.0) hi = p; else lo = p;
        const double u = seg.n0 * seg.sin0 + 0.5 * seg.alpha * p;
        const double step = f / std::sqrt(seg.xi * seg.xi + u * u);
        double next = p - step;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - p) <= 1e-15 * std::max(1.0, std::fabs(p))) return next;
        p = next;
    }
    return p;
}

struct Exit {
    double param = std::numeric_limits<double>::infinity();
    int face = -1;
};

Exit find_exit(const AdaptiveMesh& mesh, int t, const RaySegment& seg, const Vec3& x, const Vec3& dir,
               double eps_p) {
    const BaryPlanes& bp = mesh.planes(t);
    Exit best;
    double best_dot = -2.0;
    double cand[4];
    for (int i = 0; i < 4; ++i) {
        cand[i] = std::numeric_limits<double>::infinity();
        // Already on face i and heading out: leave at once.
        if (bp.eval(i, x) <= 1e-12 && dot(bp.g[i], dir) < 0.0) {
            cand[i] = 0.0;
            continue;
        }
        if (auto r = seg.intersect_plane(bp.g[i], bp.o[i], eps_p, Crossing::decreasing)) cand[i] = *r;
    }
    int ties = 0;
    for (int i = 0; i < 4; ++i)
        if (cand[i] < best.param) {
            best.param = cand[i];
            best.face = i;
        }
    if (!std::isfinite(best.param)) return {};
    for (int i = 0; i < 4; ++i) ties += cand[i] <= best.param + eps_p;
    if (ties == 1) return best;
    for (int i = 0; i < 4; ++i) {
        if (!(cand[i] <= best.param + eps_p)) continue;
        const double d = dot(mesh.outward_normal(t, i), seg.tangent_at(cand[i]));
        if (d > best_dot) {
            best_dot = d;
            best.face = i;
        }
    }
    best.param = cand[best.face];
    return best;
}

}  // namespace

PropagationPath trace(const AdaptiveMesh& mesh, const Vec3& origin, const Vec3& direction,
                      const TraceConfig& cfg, int* hint, TracePhaseTimes* times) {
    const auto now = [times] { return times ? Clock::now() : Clock::time_point{}; };
    const auto t_start = now();
    PropagationPath path;
    path.origin = origin;
    path.direction = normalized(direction);
    path.segments.reserve(64);
    if (!cfg.force_linear && mesh.gradients.size() != mesh.tets.size())
        throw DomainError("trace: mesh has no gradients; bake them first");

    auto t0 = now();
    int cell = mesh.locate_canonical(origin, hint ? *hint : -1);
    if (times) times->locate += seconds_since(t0);
    if (hint) *hint = cell;

    Vec3 x = origin;
    Vec3 d = path.direction;
    int reflections = 0;
    std::size_t visited = 0;
    const auto& tris = mesh.scene.triangles;

    auto finish = [&](Termination term, std::string diag = {}) {
        path.termination = term;
        path.diagnostic = std::move(diag);
        path.end_point = x;
        path.end_direction = d;
        if (times) times->total += seconds_since(t_start);
        return path;
    };

    while (true) {
        if (++visited > cfg.max_cells) return finish(Termination::trapped, "max_cells reached");

        t0 = now();
        RaySegment seg;
        if (cfg.force_linear) {
            seg = make_linear_segment(x, d);
        } else {
            const double m0 = mesh.interpolate(cell, x);
            seg = make_segment(x, d, mesh.gradients[cell], m0, mesh.quantity);
        }
        if (times) times->curves += seconds_since(t0);

        t0 = now();
        const double eps = cfg.epsilon_exit * mesh.diameter(cell);
        const double eps_p = eps * seg.param_per_length();
        Exit ex = find_exit(mesh, cell, seg, x, d, eps_p);

        // Linked boundary triangles, hit before (or tied with) the face exit.
        int hit_tri = -1;
        double hit_param = std::numeric_limits<double>::infinity();
        for (int k : mesh.linked(cell)) {
            const SceneTriangle& tri = tris[k];
            const Vec3 n = tri.normal();
            auto r = seg.intersect_plane(n, -dot(n, tri.v[0]), eps_p, Crossing::any);
            if (!r || *r > ex.param + eps_p || *r >= hit_param) continue;
            if (!point_in_triangle(seg.point(*r), tri, 1e-9)) continue;
            hit_param = *r;
            hit_tri = k;
        }
        if (times) times->intersect += seconds_since(t0);

        if (ex.face < 0 && hit_tri < 0) return finish(Termination::trapped, "no admissible exit from cell " + std::to_string(cell));

        const double end_param = hit_tri >= 0 ? hit_param : ex.param;
        double seg_len = seg.arc_length(end_param);
        PathSegment ps;
        ps.cell = cell;
        ps.entry = x;

        if (path.total_travel + seg_len > cfg.max_travel) {
            const double remaining = cfg.max_travel - path.total_travel;
            const double p = param_at_length(seg, remaining, end_param);
            seg.param_end = p;
            seg.travel_length = remaining;
            ps.curve = seg;
            ps.exit = seg.point(p);
            ps.length = remaining;
            path.segments.push_back(ps);
            path.total_travel = cfg.max_travel;
            x = ps.exit;
            d = seg.tangent_at(p);
            return finish(Termination::max_travel);
        }

        seg.param_end = end_param;
        seg.travel_length = seg_len;
        ps.curve = seg;
        ps.exit = seg.point(end_param);
        ps.length = seg_len;
        path.segments.push_back(ps);
        path.total_travel += seg_len;
        x = ps.exit;
        d = seg.tangent_at(end_param);

        if (hit_tri >= 0) {
            const SceneTriangle& tri = tris[hit_tri];
            BoundaryEvent ev;
            ev.position = x;
            ev.incident = d;
            ev.reflected = normalized(reflect(d, tri.normal()));
            ev.surface_id = tri.surface_id;
            ev.triangle = hit_tri;
            ev.travel = path.total_travel;
            path.events.push_back(ev);
            if (!mesh.scene.is_reflective(tri.surface_id)) return finish(Termination::absorbed);
            if (reflections >= cfg.max_reflections) return finish(Termination::max_depth);
            ++reflections;
            d = ev.reflected;
            continue;  // same cell
        }

        const int nb = mesh.neighbors[cell][ex.face];
        if (nb < 0) return finish(Termination::exited);
        if (mesh.contains(nb, x)) {
            cell = nb;
            continue;
        }
        // Exit through an edge or vertex: step past it and relocate.
        ++path.nudges;
        const Vec3 probe = x + d * eps;
        t0 = now();
        try {
            cell = mesh.locate(probe, nb);
        } catch (const OutsideDomainError&) {
            if (times) times->locate += seconds_since(t0);
            return finish(Termination::exited);
        }
        if (times) times->locate += seconds_since(t0);
    }
}

std::vector<PropagationPath> trace_fan(const AdaptiveMesh& mesh, const Vec3& origin,
                                       const std::vector<Vec3>& directions, const TraceConfig& cfg) {
    std::vector<PropagationPath> out;
    out.reserve(directions.size());
    int hint = -1;
    for (const Vec3& dir : directions) {
        try {
            out.push_back(trace(mesh, origin, dir, cfg, &hint));
        } catch (const Error& e) {
            PropagationPath p;
            p.origin = origin;
            p.direction = normalized(dir);
            p.end_point = origin;
            p.end_direction = p.direction;
            p.termination = Termination::trapped;
            p.diagnostic = e.what();
            out.push_back(std::move(p));
        }
    }
    return out;
}

std::vector<Vec3> elevation_fan(const std::vector<double>& elevations, double azimuth) {
    std::vector<Vec3> dirs;
    const double ca = std::cos(azimuth), sa = std::sin(azimuth);
    for (double e : elevations) dirs.push_back({std::cos(e) * ca, std::cos(e) * sa, std::sin(e)});
    return dirs;
}

std::vector<Vec3> sphere_fan(int count) {
    std::vector<Vec3> dirs;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / count;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return dirs;
}

}  // namespace curvedray
