#include "curvedray/reference_stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "curvedray/error.hpp"

namespace curvedray {

std::string_view integrator_name(Integrator i) { return i == Integrator::euler ? "euler" : "rk4"; }

Integrator parse_integrator(std::string_view name) {
    if (name == "euler") return Integrator::euler;
    if (name == "rk4") return Integrator::rk4;
    throw FormatError("unknown integrator '" + std::string(name) + "'");
}

Vec3 ProfileMedia::clamp(const Vec3& x) const {
    return {std::clamp(x.x, box_.lo.x, box_.hi.x), std::clamp(x.y, box_.lo.y, box_.hi.y),
            std::clamp(x.z, box_.lo.z, box_.hi.z)};
}

double ProfileMedia::index(const Vec3& x) const { return profile_.index(clamp(x)); }
Vec3 ProfileMedia::index_gradient(const Vec3& x) const { return profile_.index_gradient(clamp(x)); }

GridMedia::GridMedia(const MediaGrid& grid) : n_(grid.converted(Quantity::index)), box_(grid.bounds()) {}

double GridMedia::index(const Vec3& x) const { return n_.sample(x); }

Vec3 GridMedia::index_gradient(const Vec3& x) const {
    int idx[3];
    double t[3];
    for (int a = 0; a < 3; ++a) {
        const double u = std::clamp((x[a] - n_.origin[a]) / n_.spacing[a], 0.0, double(n_.dims[a] - 1));
        const int i = std::min(static_cast<int>(std::floor(u)), n_.dims[a] - 2);
        idx[a] = i;
        t[a] = u - i;
    }
    Vec3 g;
    for (int c = 0; c < 8; ++c) {
        const int d[3] = {c & 1, (c >> 1) & 1, (c >> 2) & 1};
        const double v = n_.at(idx[0] + d[0], idx[1] + d[1], idx[2] + d[2]);
        double w[3], dw[3];
        for (int a = 0; a < 3; ++a) {
            w[a] = d[a] ? t[a] : 1.0 - t[a];
            dw[a] = (d[a] ? 1.0 : -1.0) / n_.spacing[a];
        }
        g.x += v * dw[0] * w[1] * w[2];
        g.y += v * w[0] * dw[1] * w[2];
        g.z += v * w[0] * w[1] * dw[2];
    }
    return g;
}

MeshMedia::MeshMedia(const AdaptiveMesh& mesh) : mesh_(mesh) {
    if (mesh.gradients.size() != mesh.tets.size()) throw DomainError("MeshMedia: mesh has no gradients");
}

int MeshMedia::cell(const Vec3& x) const {
    const Box3& b = mesh_.bounds();
    const Vec3 q{std::clamp(x.x, b.lo.x, b.hi.x), std::clamp(x.y, b.lo.y, b.hi.y), std::clamp(x.z, b.lo.z, b.hi.z)};
    if (hint_ >= 0 && mesh_.contains(hint_, q)) return hint_;
    hint_ = mesh_.locate(q, hint_);
    return hint_;
}

double MeshMedia::index(const Vec3& x) const {
    const int t = cell(x);
    return convert_quantity(mesh_.interpolate(t, x), mesh_.quantity, Quantity::index, mesh_.reference_speed);
}

Vec3 MeshMedia::index_gradient(const Vec3& x) const {
    const int t = cell(x);
    const double m = mesh_.interpolate(t, x);
    const Vec3& g = mesh_.gradients[t].grad;
    switch (mesh_.quantity) {
        case Quantity::index: return g;
        case Quantity::index_squared: return g * (0.5 / std::sqrt(m));
        case Quantity::speed: return g * (-mesh_.reference_speed / (m * m));
    }
    return g;
}

namespace {

struct State {
    Vec3 x;
    Vec3 p;
};

State derivative(const MediaSource& m, const State& s) {
    return {s.p / m.index(s.x), m.index_gradient(s.x)};
}

State advance(const MediaSource& m, const State& s, double ds, Integrator integ) {
    if (integ == Integrator::euler) {
        const State k = derivative(m, s);
        return {s.x + k.x * ds, s.p + k.p * ds};
    }
    const State k1 = derivative(m, s);
    const State k2 = derivative(m, {s.x + k1.x * (0.5 * ds), s.p + k1.p * (0.5 * ds)});
    const State k3 = derivative(m, {s.x + k2.x * (0.5 * ds), s.p + k2.p * (0.5 * ds)});
    const State k4 = derivative(m, {s.x + k3.x * ds, s.p + k3.p * ds});
    return {s.x + (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x) * (ds / 6.0),
            s.p + (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p) * (ds / 6.0)};
}

// Chord parameter in (0, 1] where a -> b meets the triangle, or < 0.
double chord_triangle(const Vec3& a, const Vec3& b, const SceneTriangle& tri) {
    const Vec3 dir = b - a;
    const Vec3 e1 = tri.v[1] - tri.v[0], e2 = tri.v[2] - tri.v[0];
    const Vec3 h = cross(dir, e2);
    const double det = dot(e1, h);
    if (det == 0.0) return -1.0;
    const double inv = 1.0 / det;
    const Vec3 s = a - tri.v[0];
    const double u = dot(s, h) * inv;
    if (u < -1e-12 || u > 1.0 + 1e-12) return -1.0;
    const Vec3 q = cross(s, e1);
    const double v = dot(dir, q) * inv;
    if (v < -1e-12 || u + v > 1.0 + 1e-12) return -1.0;
    const double t = dot(e2, q) * inv;
    return (t >= 0.0 && t <= 1.0) ? t : -1.0;
}

// Chord parameter where a -> b leaves the box, assuming a inside.
double chord_box_exit(const Vec3& a, const Vec3& b, const Box3& box) {
    double t_exit = 1.0;
    for (int ax = 0; ax < 3; ++ax) {
        const double d = b[ax] - a[ax];
        if (d > 0.0 && b[ax] > box.hi[ax]) t_exit = std::min(t_exit, (box.hi[ax] - a[ax]) / d);
        if (d < 0.0 && b[ax] < box.lo[ax]) t_exit = std::min(t_exit, (box.lo[ax] - a[ax]) / d);
    }
    return std::max(t_exit, 0.0);
}

}  // namespace

PropagationPath step_trace(const MediaSource& media, const BoundaryScene& scene, const Vec3& origin,
                           const Vec3& direction, const StepperConfig& cfg) {
    if (!(cfg.step_size > 0.0)) throw DomainError("step_trace: step size must be positive");
    const Box3& box = media.bounds();
    if (!box.contains(origin, 1e-12 * box.diagonal())) throw OutsideDomainError("step_trace: origin outside media box");

    PropagationPath path;
    path.origin = origin;
    path.direction = normalized(direction);
    State s{origin, path.direction * media.index(origin)};
    int reflections = 0;
    int last_tri = -1;
    const double scale = box.diagonal();

    auto finish = [&](Termination term, std::string diag = {}) {
        path.termination = term;
        path.diagnostic = std::move(diag);
        path.end_point = s.x;
        path.end_direction = normalized(s.p);
        return path;
    };
    auto record = [&](const Vec3& a, const Vec3& b) {
        const double len = distance(a, b);
        path.total_travel += len;
        if (!cfg.record_polyline || len == 0.0) return;
        PathSegment ps;
        ps.curve = make_linear_segment(a, b - a);
        ps.curve.param_end = len;
        ps.curve.travel_length = len;
        ps.entry = a;
        ps.exit = b;
        ps.length = len;
        path.segments.push_back(ps);
    };

    for (std::size_t step = 0; step < cfg.limits.max_cells; ++step) {
        double ds = cfg.step_size;
        State next = advance(media, s, ds, cfg.integrator);

        // Earliest chord event: triangle, box exit, or travel limit.
        double t_event = 1.0;
        int tri_hit = -1;
        for (std::size_t k = 0; k < scene.triangles.size(); ++k) {
            const double t = chord_triangle(s.x, next.x, scene.triangles[k]);
            if (t < 0.0) continue;
            if (static_cast<int>(k) == last_tri && t * distance(s.x, next.x) <= 1e-9 * scale) continue;
            if (t <= 1e-15 && static_cast<int>(k) != last_tri) {
                // Starting on a surface and moving away is not a hit.
                const Vec3 n = scene.triangles[k].normal();
                if (dot(next.x - s.x, n) * dot(s.x - scene.triangles[k].v[0], n) >= 0.0) continue;
            }
            if (t < t_event || (t == t_event && tri_hit < 0)) {
                t_event = t;
                tri_hit = static_cast<int>(k);
            }
        }
        const double t_box = chord_box_exit(s.x, next.x, box);
        bool box_exit = false;
        // A triangle on the box face wins the tie with the box exit.
        if (t_box < 1.0 && (tri_hit < 0 ? t_box < t_event : t_box < t_event - 1e-9)) {
            t_event = t_box;
            tri_hit = -1;
            box_exit = true;
        }
        const double chord = distance(s.x, next.x);
        bool travel_stop = false;
        if (path.total_travel + t_event * chord > cfg.limits.max_travel) {
            t_event = chord > 0.0 ? (cfg.limits.max_travel - path.total_travel) / chord : 0.0;
            tri_hit = -1;
            box_exit = false;
            travel_stop = true;
        }

        const Vec3 x_event = s.x + (next.x - s.x) * t_event;
        const Vec3 p_event = s.p + (next.p - s.p) * t_event;
        record(s.x, x_event);
        s = {x_event, p_event};

        if (travel_stop) {
            path.total_travel = cfg.limits.max_travel;
            return finish(Termination::max_travel);
        }
        if (box_exit) return finish(Termination::exited);
        if (tri_hit >= 0) {
            const SceneTriangle& tri = scene.triangles[tri_hit];
            BoundaryEvent ev;
            ev.position = s.x;
            ev.incident = normalized(s.p);
            ev.reflected = normalized(reflect(ev.incident, tri.normal()));
            ev.surface_id = tri.surface_id;
            ev.triangle = tri_hit;
            ev.travel = path.total_travel;
            path.events.push_back(ev);
            if (!scene.is_reflective(tri.surface_id)) return finish(Termination::absorbed);
            if (reflections >= cfg.limits.max_reflections) return finish(Termination::max_depth);
            ++reflections;
            s.p = reflect(s.p, tri.normal());
            last_tri = tri_hit;
            continue;
        }
        last_tri = -1;
    }
    return finish(Termination::trapped, "step limit reached");
}

PropagationPath converged_trace(const MediaSource& media, const BoundaryScene& scene, const Vec3& origin,
                                const Vec3& direction, double tol, StepperConfig cfg, int max_halvings,
                                std::vector<ConvergenceStep>* history) {
    std::vector<ConvergenceStep> hist;
    PropagationPath prev = step_trace(media, scene, origin, direction, cfg);
    hist.push_back({cfg.step_size, prev.end_point, prev.total_travel, 0.0});
    for (int h = 0; h < max_halvings; ++h) {
        cfg.step_size *= 0.5;
        PropagationPath cur = step_trace(media, scene, origin, direction, cfg);
        const double change = distance(cur.end_point, prev.end_point);
        hist.push_back({cfg.step_size, cur.end_point, cur.total_travel, change});
        if (change < tol && cur.termination == prev.termination) {
            if (history) *history = std::move(hist);
            return cur;
        }
        prev = std::move(cur);
    }
    if (history) *history = hist;
    std::ostringstream os;
    os << "converged_trace: no convergence after " << max_halvings << " halvings; changes:";
    for (const auto& c : hist) os << ' ' << c.change;
    throw ConvergenceError(os.str());
}

}  // namespace curvedray
