#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "curvedray/adaptive_mesh.hpp"
#include "curvedray/media_profiles.hpp"

namespace curvedray {

/// Named benchmark profiles: "a-lu", "a-ld", "a-lu+f", "a-ld+f", "hotspot",
/// "wind-upwind", "wind-downwind", "mirage-inferior", "mirage-superior",
/// "constant". Throws DomainError for an unknown name.
std::unique_ptr<Profile> preset_profile(const std::string& name, std::uint64_t seed = 1);
std::vector<std::string> preset_names();

/// Desk-scale atmospheric scene: a cubic grid from the origin, ground at z = 0.
struct DeskConfig {
    int dims = 64;
    double spacing = 1.25;       // m
    double b = -1.0;             // m/s; negative refracts upward
    double c0 = 340.0;
    double zg = 1.0;
    bool fluctuation = true;
    std::uint64_t seed = 1;
    int modes = 12;
    double min_wavelength = 20.0;  // m
    double max_wavelength = 60.0;  // m
    double amplitude = 1e-3;       // sum of mode amplitudes in n
    bool reflective_ground = true;
};

StratifiedProfile desk_profile(const DeskConfig& cfg);
MediaGrid desk_grid(const Profile& profile, const DeskConfig& cfg, Quantity q = Quantity::speed);
BoundaryScene desk_ground(const MediaGrid& grid, bool reflective = true);
Vec3 desk_source(const MediaGrid& grid, double height = 10.0);

/// Resample, tetrahedralize, bake gradients and link the scene.
AdaptiveMesh build_mesh(const MediaGrid& grid, const BoundaryScene& scene, double sigma, GradientMethod method,
                        Quantity mesh_quantity = Quantity::speed, MeshBuildReport* report = nullptr);

}  // namespace curvedray
