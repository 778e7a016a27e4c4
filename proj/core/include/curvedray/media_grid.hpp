#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "curvedray/media_profiles.hpp"
#include "curvedray/vec3.hpp"

namespace curvedray {

/// Regular grid of scalar media samples at cell corners. Values are stored
/// x-fastest: index = i + nx * (j + ny * k).
struct MediaGrid {
    std::array<int, 3> dims{2, 2, 2};
    Vec3 origin;
    Vec3 spacing{1.0, 1.0, 1.0};
    Quantity quantity = Quantity::index;
    double reference_speed = 340.0;
    std::vector<double> values;

    std::size_t size() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t linear_index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims[1]) * k);
    }
    double at(int i, int j, int k) const { return values[linear_index(i, j, k)]; }
    Vec3 position(int i, int j, int k) const {
        return origin + Vec3{i * spacing.x, j * spacing.y, k * spacing.z};
    }
    Box3 bounds() const;

    /// Trilinear interpolation; points outside the box are clamped onto it.
    double sample(const Vec3& x) const;

    /// Copy with values converted to another quantity.
    MediaGrid converted(Quantity to) const;

    /// Throws FormatError when dims, spacing or values break the invariants.
    void validate() const;
};

/// Sample `profile` at every grid corner.
MediaGrid bake_grid(const Profile& profile, std::array<int, 3> dims, const Vec3& origin,
                    const Vec3& spacing, Quantity quantity);

enum class GridEncoding { binary, text };

/// Text header ("curvedray-grid 1", dims, origin, spacing, quantity,
/// reference_speed, encoding, "data") followed by the values, either as
/// little-endian float64 or as whitespace-separated decimal text.
void write_grid(const MediaGrid& grid, const std::filesystem::path& path,
                GridEncoding encoding = GridEncoding::binary);
void write_grid(const MediaGrid& grid, std::ostream& os, GridEncoding encoding);
MediaGrid read_grid(const std::filesystem::path& path);
MediaGrid read_grid(std::istream& is);

}  // namespace curvedray
