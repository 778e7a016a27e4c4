#pragma once

#include <filesystem>
#include <iosfwd>

#include "curvedray/adaptive_mesh.hpp"

namespace curvedray {

// Mesh cache, little-endian binary:
//   "CRMESH\0\0", u32 version, u8 quantity, u8 gradient method, f64 c0,
//   vertices (position, value, spacing), tets, neighbors, gradients
//   (vec3 + fallback flag), scene triangles and materials, link CSR.
// Every array is prefixed by its u64 length.

void write_mesh(const AdaptiveMesh& mesh, std::ostream& os);
void write_mesh(const AdaptiveMesh& mesh, const std::filesystem::path& path);

/// Throws FormatError on bad magic or truncation, VersionError on an
/// unknown version, GeometryError when the stored tets are invalid.
AdaptiveMesh read_mesh(std::istream& is);
AdaptiveMesh read_mesh(const std::filesystem::path& path);

}  // namespace curvedray
