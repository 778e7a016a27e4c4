#include "curvedray/scenarios.hpp"

#include "curvedray/error.hpp"
#include "curvedray/gradient.hpp"

namespace curvedray {

std::vector<std::string> preset_names() {
    return {"constant",      "a-lu",          "a-ld",           "a-lu+f",         "a-ld+f",
            "hotspot",       "wind-upwind",   "wind-downwind",  "mirage-inferior", "mirage-superior"};
}

std::unique_ptr<Profile> preset_profile(const std::string& name, std::uint64_t seed) {
    DeskConfig desk;
    desk.seed = seed;
    if (name == "constant") return std::make_unique<ConstantProfile>(1.0, desk.c0);
    if (name == "a-lu" || name == "a-ld" || name == "a-lu+f" || name == "a-ld+f") {
        desk.b = name.starts_with("a-lu") ? -1.0 : 1.0;
        desk.fluctuation = name.ends_with("+f");
        return std::make_unique<StratifiedProfile>(desk_profile(desk));
    }
    if (name == "hotspot") {
        HotSpotParams p;
        p.center = {40.0, 40.0, 0.0};
        return std::make_unique<HotSpotProfile>(p);
    }
    if (name == "wind-upwind" || name == "wind-downwind") {
        WindOverHillParams p;
        p.hill_height = 5.0;
        p.hill_radius = 20.0;
        p.influence_thickness = 5.0;
        p.hill_apex = {40.0, 40.0, 0.0};
        p.direction = name == "wind-upwind" ? WindDirection::upwind : WindDirection::downwind;
        return std::make_unique<WindOverHillProfile>(p);
    }
    if (name == "mirage-inferior" || name == "mirage-superior") {
        MirageParams p;
        p.kind = name == "mirage-inferior" ? MirageKind::inferior : MirageKind::superior;
        return std::make_unique<MirageProfile>(p);
    }
    throw DomainError("unknown profile preset '" + name + "'");
}

StratifiedProfile desk_profile(const DeskConfig& cfg) {
    FluctuationField f;
    if (cfg.fluctuation)
        f = FluctuationField::random(cfg.seed, cfg.modes, cfg.min_wavelength, cfg.max_wavelength, cfg.amplitude);
    return StratifiedProfile({cfg.b, cfg.c0, cfg.zg}, std::move(f));
}

MediaGrid desk_grid(const Profile& profile, const DeskConfig& cfg, Quantity q) {
    return bake_grid(profile, {cfg.dims, cfg.dims, cfg.dims}, {0.0, 0.0, 0.0},
                     {cfg.spacing, cfg.spacing, cfg.spacing}, q);
}

BoundaryScene desk_ground(const MediaGrid& grid, bool reflective) {
    const Box3 box = grid.bounds();
    return make_ground_plane(box, box.lo.z, 0, reflective);
}

Vec3 desk_source(const MediaGrid& grid, double height) {
    const Box3 box = grid.bounds();
    const Vec3 c = box.center();
    return {c.x, c.y, box.lo.z + height};
}

AdaptiveMesh build_mesh(const MediaGrid& grid, const BoundaryScene& scene, double sigma, GradientMethod method,
                        Quantity mesh_quantity, MeshBuildReport* report) {
    ResampleParams rp;
    rp.sigma = sigma;
    AdaptiveMesh mesh = build_adaptive_mesh(grid, rp, mesh_quantity, report);
    if (method != GradientMethod::none) bake_gradients(mesh, method);
    if (!scene.empty()) link_boundary(mesh, scene);
    return mesh;
}

}  // namespace curvedray
