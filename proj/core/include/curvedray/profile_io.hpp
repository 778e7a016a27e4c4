#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "curvedray/media_profiles.hpp"

namespace curvedray {

// Profile description documents are JSON objects with a "kind" field:
//
//   {"kind": "constant", "n": 1.0, "c0": 340}
//   {"kind": "linear_speed", "c_origin": 340, "gradient": [0, 0, 0.1], "c0": 340}
//   {"kind": "linear_index_squared", "n2_origin": 1.0, "gradient": [0, 0, 1e-3], "c0": 1}
//   {"kind": "stratified", "b": -1, "c0": 340, "zg": 1,
//    "fluctuation": {"seed": 7, "modes": 12, "min_wavelength": 20,
//                    "max_wavelength": 60, "total_amplitude": 1e-3}}
//   {"kind": "hotspot", "center": [x, y, z], "ts": 373, "t0": 273, "d0": 5,
//    "base": {"b": -1, "c0": 340, "zg": 1}}
//   {"kind": "wind_over_hill", "u_star": 0.5, "von_karman": 0.4, "zg": 0.1,
//    "hill_height": 10, "hill_radius": 50, "influence_thickness": 10, "z0": 0.1,
//    "hill_apex": [x, y, 0], "direction": "upwind", "c0": 340}
//   {"kind": "mirage", "mu0": 1.000233, "mu1": 0.4584, "beta": 2.303, "type": "inferior"}
//
// "fluctuation" may also list explicit modes:
//   "fluctuation": {"modes": [{"k": [kx, ky, kz], "phase": p, "amplitude": g}, ...]}
//
// Omitted numeric fields take the defaults of the corresponding parameter struct.

std::unique_ptr<Profile> parse_profile(const std::string& json_text);
std::unique_ptr<Profile> read_profile(const std::filesystem::path& path);

/// Serialize a profile; the result parses back to an equivalent profile.
/// Random fluctuation fields are written as explicit mode lists.
std::string profile_to_json(const Profile& profile);

}  // namespace curvedray
