#include <cmath>

#include <gtest/gtest.h>

#include "curvedray/analysis.hpp"
#include "curvedray/error.hpp"
#include "curvedray/gradient.hpp"
#include "curvedray/scenarios.hpp"
#include "oracles.hpp"

namespace cr = curvedray;

namespace {

// Grid storing n directly, linear in position.
cr::MediaGrid linear_index_grid(double scale = 1.0) {
    cr::MediaGrid g;
    g.dims = {9, 9, 9};
    g.spacing = {1, 1, 1};
    g.quantity = cr::Quantity::index;
    for (int k = 0; k < 9; ++k)
        for (int j = 0; j < 9; ++j)
            for (int i = 0; i < 9; ++i) g.values.push_back(scale * (1.0 + 0.01 * i - 0.005 * j + 0.02 * k));
    return g;
}

cr::MediaGrid wavy_grid(double scale = 1.0) {
    cr::MediaGrid g = linear_index_grid();
    for (int k = 0; k < 9; ++k)
        for (int j = 0; j < 9; ++j)
            for (int i = 0; i < 9; ++i)
                g.values[g.linear_index(i, j, k)] = scale * (1.0 + 0.01 * std::sin(0.9 * i) * std::cos(0.7 * k));
    return g;
}

cr::AdaptiveMesh all_points_mesh(const cr::MediaGrid& g) {
    std::vector<cr::SamplePoint> pts;
    for (int k = 0; k < g.dims[2]; ++k)
        for (int j = 0; j < g.dims[1]; ++j)
            for (int i = 0; i < g.dims[0]; ++i) pts.push_back({g.position(i, j, k), g.at(i, j, k), 1.0});
    return cr::tetrahedralize(std::move(pts), g.quantity, g.reference_speed);
}

cr::PropagationPath fake_path(const cr::Vec3& end, double travel) {
    cr::PropagationPath p;
    p.end_point = end;
    p.total_travel = travel;
    return p;
}

}  // namespace

TEST(InterpolationError, LinearFieldIsExact) {
    const auto g = linear_index_grid();
    const auto m = cr::build_mesh(g, {}, 0.01, cr::GradientMethod::none, cr::Quantity::index);
    const auto r = cr::interpolation_error(g, m, 0.01);
    EXPECT_LE(r.e_rel, 1e-10);
    EXPECT_EQ(r.grid_points, g.size());
    EXPECT_EQ(r.outside, 0u);
    EXPECT_FALSE(r.outside_warning);
    EXPECT_EQ(r.samples, m.vertices.size());
    EXPECT_EQ(r.sigma, 0.01);
}

TEST(InterpolationError, AllGridPointsAsVerticesIsExact) {
    const auto g = wavy_grid();
    const auto r = cr::interpolation_error(g, all_points_mesh(g));
    EXPECT_LE(r.e_rel, 1e-12);
    EXPECT_LE(r.max_abs, 1e-12);
}

TEST(InterpolationError, InvariantUnderScaling) {
    const auto a = wavy_grid(1.0), b = wavy_grid(3.0);
    auto mesh_of = [](const cr::MediaGrid& g) {
        std::vector<cr::SamplePoint> pts;
        for (int k = 0; k < 9; k += 2)
            for (int j = 0; j < 9; j += 2)
                for (int i = 0; i < 9; i += 2) pts.push_back({g.position(i, j, k), g.at(i, j, k), 1.0});
        return cr::tetrahedralize(std::move(pts), g.quantity, g.reference_speed);
    };
    const auto ra = cr::interpolation_error(a, mesh_of(a));
    const auto rb = cr::interpolation_error(b, mesh_of(b));
    EXPECT_GT(ra.e_rel, 0.0);
    EXPECT_NEAR(ra.e_rel, rb.e_rel, 1e-12 * ra.e_rel);
}

TEST(InterpolationError, FlagsPointsOutsideHull) {
    const auto g = wavy_grid();
    std::vector<cr::SamplePoint> pts;
    for (int i = 0; i < 8; ++i) {
        const cr::Vec3 c{i & 1 ? 4.0 : 0.0, i & 2 ? 8.0 : 0.0, i & 4 ? 8.0 : 0.0};
        pts.push_back({c, 1.0, 1.0});
    }
    const auto m = cr::tetrahedralize(std::move(pts), cr::Quantity::index, 340.0);
    const auto r = cr::interpolation_error(g, m);
    EXPECT_EQ(r.outside, 4u * 81u);
    EXPECT_TRUE(r.outside_warning);
    EXPECT_TRUE(std::isnan(r.error[g.linear_index(8, 0, 0)]));
}

TEST(RayError, IdenticalInputsGiveZero) {
    std::vector<cr::PropagationPath> a{fake_path({1, 2, 3}, 10.0), fake_path({4, 5, 6}, 20.0)};
    const auto r = cr::ray_error(a, a);
    EXPECT_EQ(r.ray_count, 2u);
    for (double e : r.hit_error) EXPECT_EQ(e, 0.0);
    for (double e : r.travel_error) EXPECT_EQ(e, 0.0);
    EXPECT_EQ(r.fraction_within(0.0), 1.0);
}

TEST(RayError, ValuesAndMismatch) {
    std::vector<cr::PropagationPath> a{fake_path({3, 4, 0}, 11.0), fake_path({0, 0, 0}, 20.0)};
    std::vector<cr::PropagationPath> t{fake_path({0, 0, 0}, 10.0), fake_path({0, 0, 0}, 20.0)};
    const auto r = cr::ray_error(a, t);
    EXPECT_DOUBLE_EQ(r.hit_error[0], 5.0);
    EXPECT_DOUBLE_EQ(r.travel_error[0], 1.0);
    EXPECT_DOUBLE_EQ(r.relative_hit_error[0], 0.5);
    EXPECT_DOUBLE_EQ(r.relative_travel_error[0], 0.1);
    EXPECT_DOUBLE_EQ(r.fraction_within(1e-3), 0.5);
    EXPECT_DOUBLE_EQ(r.mean_hit_error(), 2.5);
    t.pop_back();
    EXPECT_THROW(cr::ray_error(a, t), cr::DomainError);
}

TEST(RayError, UniformMediaCurvedMatchesConvergedStepper) {
    cr::ConstantProfile prof(1.0, 340.0);
    const auto g = cr::bake_grid(prof, {5, 5, 5}, {}, {5, 5, 5}, cr::Quantity::speed);
    const auto mesh = cr::build_mesh(g, cr::desk_ground(g), 0.001, cr::GradientMethod::regression);
    cr::ProfileMedia media(prof, g.bounds());
    const auto dirs = cr::sphere_fan(30);
    const cr::Vec3 o{10, 10, 5};
    cr::StepperConfig cfg;
    cfg.step_size = 1.0;
    const double tol = 1e-6;
    const auto truth = cr::reference_paths(media, mesh.scene, o, dirs, tol, cfg);
    const auto r = cr::ray_error(cr::trace_fan(mesh, o, dirs, {}), truth);
    for (double e : r.hit_error) EXPECT_LE(e, 2 * tol);
}

TEST(Reports, SerializeToJsonAndCsv) {
    const auto g = wavy_grid();
    const auto ij = cr::to_json(cr::interpolation_error(g, all_points_mesh(g), 0.002));
    EXPECT_NE(ij.find("\"e_rel\""), std::string::npos);
    std::vector<cr::PropagationPath> a{fake_path({1, 2, 3}, 10.0)};
    EXPECT_NE(cr::to_json(cr::ray_error(a, a)).find("\"ray_count\""), std::string::npos);
    cr::BenchReport b;
    b.phase_total = 2.0;
    b.phase_curves = 0.5;
    EXPECT_DOUBLE_EQ(b.curve_fraction(), 0.25);
    const auto csv = cr::to_csv(b);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    EXPECT_NE(cr::to_json(b).find("\"speedup\""), std::string::npos);
}

TEST(Benchmark, UniformMediaReportsConsistentPhases) {
    cr::ConstantProfile prof(1.0, 340.0);
    const auto g = cr::bake_grid(prof, {5, 5, 5}, {}, {5, 5, 5}, cr::Quantity::speed);
    const auto mesh = cr::build_mesh(g, {}, 0.001, cr::GradientMethod::regression);
    cr::ProfileMedia media(prof, g.bounds());
    const auto dirs = cr::sphere_fan(20);
    const cr::Vec3 o{10, 10, 10};
    cr::StepperConfig sc;
    sc.step_size = 1.0;
    const auto truth = cr::reference_paths(media, {}, o, dirs, 1e-6, sc);
    cr::BenchConfig cfg;
    cfg.min_seconds = 0.01;
    cfg.stepper_ds0 = 4.0;
    const auto r = cr::benchmark(mesh, media, o, dirs, truth, cfg);
    EXPECT_EQ(r.rays, 20u);
    EXPECT_TRUE(r.matched);
    EXPECT_DOUBLE_EQ(r.stepper_ds, 4.0);
    EXPECT_LE(r.phase_curves + r.phase_intersect + r.phase_locate, r.phase_total * 1.0001);
    EXPECT_GT(r.speedup, 0.0);
    EXPECT_GE(r.mean_cells_per_ray, 1.0);
}
