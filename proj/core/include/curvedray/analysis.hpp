#pragma once

#include <limits>
#include <string>
#include <vector>

#include "curvedray/adaptive_mesh.hpp"
#include "curvedray/reference_stepper.hpp"
#include "curvedray/traversal.hpp"

namespace curvedray {

struct InterpolationErrorReport {
    std::vector<double> error;  // n_G - n~_G per grid point, NaN when off the hull
    double e_rel = 0.0;         // ||E||_2 / ||n_G||_2 over evaluated points
    double max_abs = 0.0;
    std::size_t samples = 0;    // mesh vertex count |S|
    std::size_t grid_points = 0;
    std::size_t outside = 0;
    double sigma = std::numeric_limits<double>::quiet_NaN();
    bool outside_warning = false;  // more than 5% of grid points off the hull
};

/// Compare the mesh's barycentric interpolation of n against every grid
/// point. Vertex values are converted to n before interpolation.
InterpolationErrorReport interpolation_error(const MediaGrid& grid, const AdaptiveMesh& mesh,
                                             double sigma = std::numeric_limits<double>::quiet_NaN());

struct RayErrorReport {
    std::vector<double> hit_error;             // endpoint distance, m
    std::vector<double> travel_error;          // |L - L_truth|, m
    std::vector<double> relative_hit_error;    // hit_error / L_truth
    std::vector<double> relative_travel_error; // travel_error / L_truth
    std::size_t ray_count = 0;

    /// Fraction of rays whose relative hit and travel errors are both <= tol.
    double fraction_within(double tol) const;
    double mean_hit_error() const;
    double mean_relative_travel_error() const;
};

/// Pairwise comparison of matched ray sets; throws DomainError on a count
/// mismatch.
RayErrorReport ray_error(const std::vector<PropagationPath>& paths, const std::vector<PropagationPath>& truth);

/// Converged RK4 reference paths for a fan. Rays that fail to converge keep
/// the finest run and a diagnostic.
std::vector<PropagationPath> reference_paths(const MediaSource& media, const BoundaryScene& scene,
                                             const Vec3& origin, const std::vector<Vec3>& directions,
                                             double tol, const StepperConfig& cfg, int max_halvings = 16);

struct BenchConfig {
    TraceConfig trace;
    double stepper_ds0 = 1.0;      // first step size of the equal-accuracy sweep, m
    int max_halvings = 16;
    double accuracy_slack = 1.1;   // stepper error may exceed the curved error by this factor
    Integrator integrator = Integrator::euler;
    double min_seconds = 0.2;      // repeat timed runs until this much wall time accrues
};

struct StepSweepEntry {
    double step_size = 0.0;
    double mean_hit_error = 0.0;
};

struct BenchReport {
    std::size_t rays = 0;
    double curved_seconds = 0.0;     // per pass over all rays, untimed phases
    double phase_locate = 0.0;       // per pass, instrumented run
    double phase_curves = 0.0;
    double phase_intersect = 0.0;
    double phase_total = 0.0;
    double mean_cells_per_ray = 0.0;
    double rays_per_second = 0.0;
    double curved_error = 0.0;       // mean hit error vs truth, m
    std::vector<StepSweepEntry> sweep;
    bool matched = false;            // some swept ds met the accuracy target
    double stepper_ds = 0.0;
    double stepper_error = 0.0;
    double stepper_seconds = 0.0;    // per pass at stepper_ds
    double mean_steps_per_ray = 0.0;
    double speedup = 0.0;            // stepper_seconds / curved_seconds
    std::string integrator;

    double curve_fraction() const { return phase_total > 0.0 ? phase_curves / phase_total : 0.0; }
};

/// Time the curved tracer and the equal-accuracy stepper on one fan. The
/// stepper ds is the largest halving of stepper_ds0 whose mean hit error
/// against `truth` is within accuracy_slack times the curved error.
/// Runs single-threaded; mesh construction is not timed.
BenchReport benchmark(const AdaptiveMesh& mesh, const MediaSource& stepper_media, const Vec3& origin,
                      const std::vector<Vec3>& directions, const std::vector<PropagationPath>& truth,
                      const BenchConfig& cfg);

std::string to_json(const InterpolationErrorReport& r);
std::string to_json(const RayErrorReport& r);
std::string to_json(const BenchReport& r);

/// One-row CSV with a header line, columns mirroring the traversal time
/// breakdown.
std::string to_csv(const BenchReport& r);

}  // namespace curvedray
