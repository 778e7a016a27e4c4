#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "curvedray/adaptive_mesh.hpp"
#include "curvedray/ray_curves.hpp"

namespace curvedray {

struct TraceConfig {
    int max_reflections = 3;
    std::size_t max_cells = 1'000'000;
    double max_travel = std::numeric_limits<double>::infinity();  // m
    double epsilon_exit = 1e-9;  // fraction of the current cell's diameter
    bool force_linear = false;   // ignore gradients and trace straight lines
};

enum class Termination { exited, max_depth, max_travel, trapped, absorbed };

std::string_view termination_name(Termination t);

struct BoundaryEvent {
    Vec3 position;
    Vec3 incident;
    Vec3 reflected;
    int surface_id = 0;
    int triangle = -1;
    double travel = 0.0;  // path length up to the event, m
};

struct PathSegment {
    RaySegment curve;
    int cell = -1;
    Vec3 entry;
    Vec3 exit;
    double length = 0.0;  // m
};

struct PropagationPath {
    Vec3 origin;
    Vec3 direction;
    std::vector<PathSegment> segments;
    std::vector<BoundaryEvent> events;
    double total_travel = 0.0;
    Termination termination = Termination::trapped;
    std::string diagnostic;
    Vec3 end_point;
    Vec3 end_direction;
    std::size_t nudges = 0;

    std::vector<int> cell_sequence() const;
    /// Polyline through every segment with `samples` interior points each.
    std::vector<Vec3> polyline(int samples = 4) const;
};

/// Per-phase wall-clock totals in seconds, filled when requested.
struct TracePhaseTimes {
    double locate = 0.0;
    double curves = 0.0;
    double intersect = 0.0;
    double total = 0.0;
};

/// Curved-ray traversal of the mesh from `origin` along `direction`.
/// `hint` seeds point location and receives the starting cell. Throws
/// OutsideDomainError when the origin is off the mesh.
PropagationPath trace(const AdaptiveMesh& mesh, const Vec3& origin, const Vec3& direction,
                      const TraceConfig& cfg, int* hint = nullptr, TracePhaseTimes* times = nullptr);

/// Trace many rays from one origin, chaining the location hint. Rays that
/// fail carry termination=trapped and the error in `diagnostic`.
std::vector<PropagationPath> trace_fan(const AdaptiveMesh& mesh, const Vec3& origin,
                                       const std::vector<Vec3>& directions, const TraceConfig& cfg);

/// Directions in the x-z plane at the given elevation angles (radians),
/// rotated about z by `azimuth`.
std::vector<Vec3> elevation_fan(const std::vector<double>& elevations, double azimuth = 0.0);

/// Quasi-uniform directions on the unit sphere (Fibonacci lattice).
std::vector<Vec3> sphere_fan(int count);

}  // namespace curvedray
