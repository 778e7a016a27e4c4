#include "curvedray/analysis.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "curvedray/error.hpp"
#include "json.hpp"

namespace curvedray {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Run `body` repeatedly until min_seconds elapse; returns seconds per call.
template <class F>
double time_per_pass(F&& body, double min_seconds) {
    int passes = 0;
    const auto t0 = Clock::now();
    double elapsed = 0.0;
    do {
        body();
        ++passes;
        elapsed = seconds_since(t0);
    } while (elapsed < min_seconds);
    return elapsed / passes;
}

std::vector<PropagationPath> step_fan(const MediaSource& media, const BoundaryScene& scene, const Vec3& origin,
                                      const std::vector<Vec3>& dirs, const StepperConfig& cfg) {
    std::vector<PropagationPath> out;
    out.reserve(dirs.size());
    for (const Vec3& d : dirs) out.push_back(step_trace(media, scene, origin, d, cfg));
    return out;
}

}  // namespace

InterpolationErrorReport interpolation_error(const MediaGrid& grid, const AdaptiveMesh& mesh, double sigma) {
    InterpolationErrorReport r;
    r.sigma = sigma;
    r.samples = mesh.vertices.size();
    r.grid_points = grid.size();
    r.error.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    const MediaGrid n = grid.converted(Quantity::index);
    std::vector<double> vertex_n(mesh.vertices.size());
    for (std::size_t v = 0; v < vertex_n.size(); ++v)
        vertex_n[v] = convert_quantity(mesh.vertices[v].value, mesh.quantity, Quantity::index, mesh.reference_speed);

    double err2 = 0.0, ref2 = 0.0;
    int hint = -1;
    for (int k = 0; k < grid.dims[2]; ++k)
        for (int j = 0; j < grid.dims[1]; ++j)
            for (int i = 0; i < grid.dims[0]; ++i) {
                const std::size_t idx = grid.linear_index(i, j, k);
                const Vec3 x = grid.position(i, j, k);
                try {
                    hint = mesh.locate(x, hint);
                } catch (const OutsideDomainError&) {
                    ++r.outside;
                    continue;
                }
                const auto lam = mesh.barycentric(hint, x);
                double interp = 0.0;
                for (int a = 0; a < 4; ++a) interp += lam[a] * vertex_n[mesh.tets[hint][a]];
                const double e = n.values[idx] - interp;
                r.error[idx] = e;
                err2 += e * e;
                ref2 += n.values[idx] * n.values[idx];
                r.max_abs = std::max(r.max_abs, std::fabs(e));
            }
    r.e_rel = ref2 > 0.0 ? std::sqrt(err2 / ref2) : 0.0;
    r.outside_warning = r.outside * 20 > r.grid_points;
    return r;
}

double RayErrorReport::fraction_within(double tol) const {
    if (ray_count == 0) return 0.0;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < ray_count; ++i)
        if (relative_hit_error[i] <= tol && relative_travel_error[i] <= tol) ++ok;
    return static_cast<double>(ok) / static_cast<double>(ray_count);
}

double RayErrorReport::mean_hit_error() const { return mean(hit_error); }
double RayErrorReport::mean_relative_travel_error() const { return mean(relative_travel_error); }

RayErrorReport ray_error(const std::vector<PropagationPath>& paths, const std::vector<PropagationPath>& truth) {
    if (paths.size() != truth.size()) throw DomainError("ray_error: ray counts differ");
    RayErrorReport r;
    r.ray_count = paths.size();
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const double hit = distance(paths[i].end_point, truth[i].end_point);
        const double travel = std::fabs(paths[i].total_travel - truth[i].total_travel);
        const double len = truth[i].total_travel;
        r.hit_error.push_back(hit);
        r.travel_error.push_back(travel);
        r.relative_hit_error.push_back(len > 0.0 ? hit / len : (hit > 0.0 ? INFINITY : 0.0));
        r.relative_travel_error.push_back(len > 0.0 ? travel / len : (travel > 0.0 ? INFINITY : 0.0));
    }
    return r;
}

std::vector<PropagationPath> reference_paths(const MediaSource& media, const BoundaryScene& scene,
                                             const Vec3& origin, const std::vector<Vec3>& directions,
                                             double tol, const StepperConfig& cfg, int max_halvings) {
    std::vector<PropagationPath> out;
    out.reserve(directions.size());
    for (const Vec3& d : directions) {
        try {
            out.push_back(converged_trace(media, scene, origin, d, tol, cfg, max_halvings));
        } catch (const ConvergenceError& e) {
            StepperConfig fine = cfg;
            fine.step_size = std::ldexp(cfg.step_size, -max_halvings);
            PropagationPath p = step_trace(media, scene, origin, d, fine);
            p.diagnostic = e.what();
            out.push_back(std::move(p));
        }
    }
    return out;
}

BenchReport benchmark(const AdaptiveMesh& mesh, const MediaSource& stepper_media, const Vec3& origin,
                      const std::vector<Vec3>& directions, const std::vector<PropagationPath>& truth,
                      const BenchConfig& cfg) {
    BenchReport r;
    r.rays = directions.size();
    r.integrator = std::string(integrator_name(cfg.integrator));

    // Curved tracer: accuracy and cell counts.
    std::vector<PropagationPath> curved;
    curved.reserve(directions.size());
    {
        int hint = -1;
        for (const Vec3& d : directions) curved.push_back(trace(mesh, origin, d, cfg.trace, &hint));
    }
    r.curved_error = ray_error(curved, truth).mean_hit_error();
    std::size_t cells = 0;
    for (const auto& p : curved) cells += p.segments.size();
    r.mean_cells_per_ray = r.rays ? static_cast<double>(cells) / static_cast<double>(r.rays) : 0.0;

    r.curved_seconds = time_per_pass(
        [&] {
            int hint = -1;
            for (const Vec3& d : directions) {
                const PropagationPath p = trace(mesh, origin, d, cfg.trace, &hint);
                (void)p;
            }
        },
        cfg.min_seconds);
    r.rays_per_second = r.curved_seconds > 0.0 ? static_cast<double>(r.rays) / r.curved_seconds : 0.0;

    {
        TracePhaseTimes t;
        int passes = 0;
        const auto t0 = Clock::now();
        do {
            int hint = -1;
            for (const Vec3& d : directions) {
                const PropagationPath p = trace(mesh, origin, d, cfg.trace, &hint, &t);
                (void)p;
            }
            ++passes;
        } while (seconds_since(t0) < cfg.min_seconds);
        r.phase_locate = t.locate / passes;
        r.phase_curves = t.curves / passes;
        r.phase_intersect = t.intersect / passes;
        r.phase_total = t.total / passes;
    }

    // Equal-accuracy sweep.
    StepperConfig sc;
    sc.integrator = cfg.integrator;
    sc.limits = cfg.trace;
    sc.limits.max_cells = std::numeric_limits<std::size_t>::max();
    sc.record_polyline = false;
    sc.step_size = cfg.stepper_ds0;
    const double target = cfg.accuracy_slack * r.curved_error;
    for (int h = 0; h <= cfg.max_halvings; ++h) {
        const auto paths = step_fan(stepper_media, mesh.scene, origin, directions, sc);
        const double err = ray_error(paths, truth).mean_hit_error();
        r.sweep.push_back({sc.step_size, err});
        if (err <= target) {
            r.matched = true;
            r.stepper_ds = sc.step_size;
            r.stepper_error = err;
            double travel = 0.0;
            for (const auto& p : paths) travel += p.total_travel;
            r.mean_steps_per_ray = r.rays ? travel / sc.step_size / static_cast<double>(r.rays) : 0.0;
            break;
        }
        sc.step_size *= 0.5;
    }
    if (r.matched) {
        r.stepper_seconds = time_per_pass(
            [&] {
                for (const Vec3& d : directions) {
                    const PropagationPath p = step_trace(stepper_media, mesh.scene, origin, d, sc);
                    (void)p;
                }
            },
            cfg.min_seconds);
        r.speedup = r.curved_seconds > 0.0 ? r.stepper_seconds / r.curved_seconds : 0.0;
    }
    return r;
}

std::string to_json(const InterpolationErrorReport& r) {
    nlohmann::json j;
    j["e_rel"] = r.e_rel;
    j["max_abs"] = r.max_abs;
    j["samples"] = r.samples;
    j["grid_points"] = r.grid_points;
    j["outside"] = r.outside;
    j["outside_warning"] = r.outside_warning;
    j["sigma"] = std::isfinite(r.sigma) ? nlohmann::json(r.sigma) : nlohmann::json(nullptr);
    j["reduction"] = r.samples ? static_cast<double>(r.grid_points) / static_cast<double>(r.samples) : 0.0;
    return j.dump(2);
}

std::string to_json(const RayErrorReport& r) {
    nlohmann::json j;
    j["ray_count"] = r.ray_count;
    j["mean_hit_error"] = r.mean_hit_error();
    j["mean_relative_travel_error"] = r.mean_relative_travel_error();
    j["hit_error"] = r.hit_error;
    j["travel_error"] = r.travel_error;
    j["relative_hit_error"] = r.relative_hit_error;
    j["relative_travel_error"] = r.relative_travel_error;
    return j.dump(2);
}

std::string to_json(const BenchReport& r) {
    nlohmann::json j;
    j["rays"] = r.rays;
    j["curved_seconds"] = r.curved_seconds;
    j["phases"] = {{"locate", r.phase_locate},
                   {"compute_curves", r.phase_curves},
                   {"intersect", r.phase_intersect},
                   {"total", r.phase_total},
                   {"curve_fraction", r.curve_fraction()}};
    j["mean_cells_per_ray"] = r.mean_cells_per_ray;
    j["rays_per_second"] = r.rays_per_second;
    j["curved_error"] = r.curved_error;
    nlohmann::json sweep = nlohmann::json::array();
    for (const auto& s : r.sweep) sweep.push_back({{"step_size", s.step_size}, {"mean_hit_error", s.mean_hit_error}});
    j["stepper"] = {{"integrator", r.integrator},
                    {"matched", r.matched},
                    {"step_size", r.stepper_ds},
                    {"error", r.stepper_error},
                    {"seconds", r.stepper_seconds},
                    {"mean_steps_per_ray", r.mean_steps_per_ray},
                    {"sweep", sweep}};
    j["speedup"] = r.speedup;
    return j.dump(2);
}

std::string to_csv(const BenchReport& r) {
    std::ostringstream os;
    os.precision(9);
    os << "rays,cells_per_ray,locate_s,compute_curves_s,intersect_s,total_s,curve_fraction,"
          "curved_s,rays_per_s,curved_error_m,stepper_ds_m,stepper_error_m,stepper_s,speedup\n";
    os << r.rays << ',' << r.mean_cells_per_ray << ',' << r.phase_locate << ',' << r.phase_curves << ','
       << r.phase_intersect << ',' << r.phase_total << ',' << r.curve_fraction() << ',' << r.curved_seconds << ','
       << r.rays_per_second << ',' << r.curved_error << ',' << r.stepper_ds << ',' << r.stepper_error << ','
       << r.stepper_seconds << ',' << r.speedup << '\n';
    return os.str();
}

}  // namespace curvedray
