#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "curvedray/traversal.hpp"

namespace curvedray {

/// Serializable summary of one traced ray.
struct PathRecord {
    Vec3 origin;
    Vec3 direction;
    Vec3 end_point;
    Vec3 end_direction;
    Termination termination = Termination::trapped;
    double total_travel = 0.0;
    std::string diagnostic;
    std::vector<std::array<double, 4>> points;  // x, y, z, arc length from the origin
    std::vector<BoundaryEvent> events;
};

struct PathSet {
    std::string source = "curved";  // "curved", "euler" or "rk4"
    std::vector<PathRecord> rays;
};

/// Sample every segment at `samples` interior points plus its end points.
PathRecord make_path_record(const PropagationPath& path, int samples = 4);
PathSet make_path_set(const std::vector<PropagationPath>& paths, std::string source, int samples = 4);

/// Endpoint, direction, travel and events only; segments are empty.
std::vector<PropagationPath> summary_paths(const PathSet& set);

enum class PathFormat { csv, json, binary };

PathFormat parse_path_format(std::string_view name);
/// Format implied by the extension: .csv, .json, anything else is binary.
PathFormat path_format_for(const std::filesystem::path& path);

// CSV: header
//   ray,record,index,x,y,z,s,dx,dy,dz,termination,source,surface_id
// with one "ray" row per ray (origin, launch direction, total travel in s),
// then its "point" rows (s = arc length), "event" rows (reflected
// direction, s = travel at the event) and one "end" row (end point and
// direction).
void write_paths_csv(const PathSet& set, std::ostream& os);
void write_paths_json(const PathSet& set, std::ostream& os);
// Binary: "CRPATH\0\0", u32 version, then length-prefixed records.
void write_paths_binary(const PathSet& set, std::ostream& os);
void write_paths(const PathSet& set, const std::filesystem::path& path, PathFormat format);

PathSet read_paths_csv(std::istream& is);
PathSet read_paths_json(std::istream& is);
PathSet read_paths_binary(std::istream& is);
PathSet read_paths(const std::filesystem::path& path);

}  // namespace curvedray
