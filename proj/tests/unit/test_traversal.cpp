#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "curvedray/error.hpp"
#include "curvedray/gradient.hpp"
#include "curvedray/scenarios.hpp"
#include "curvedray/traversal.hpp"
#include "oracles.hpp"

namespace cr = curvedray;

namespace {

template <class Field>
cr::AdaptiveMesh random_mesh(std::uint64_t seed, int n, Field field, double size = 20.0) {
    cr::oracle::Rng rng(seed);
    std::vector<cr::SamplePoint> pts;
    for (int i = 0; i < 8; ++i) {
        const cr::Vec3 c{i & 1 ? size : 0.0, i & 2 ? size : 0.0, i & 4 ? size : 0.0};
        pts.push_back({c, field(c), 1.0});
    }
    for (int i = 0; i < n; ++i) {
        const cr::Vec3 x = rng.in_box({0, 0, 0}, {size, size, size});
        pts.push_back({x, field(x), 1.0});
    }
    auto m = cr::tetrahedralize(std::move(pts), cr::Quantity::speed, 340.0);
    cr::bake_gradients(m, cr::GradientMethod::regression);
    return m;
}

cr::AdaptiveMesh uniform_mesh(std::uint64_t seed = 1) {
    return random_mesh(seed, 300, [](const cr::Vec3&) { return 340.0; });
}

cr::AdaptiveMesh stratified_mesh(double b, bool ground) {
    cr::DeskConfig cfg;
    cfg.dims = 33;
    cfg.spacing = 2.5;
    cfg.b = b;
    cfg.fluctuation = false;
    const auto prof = cr::desk_profile(cfg);
    const auto g = cr::desk_grid(prof, cfg);
    const cr::BoundaryScene scene = ground ? cr::desk_ground(g) : cr::BoundaryScene{};
    return cr::build_mesh(g, scene, 0.001, cr::GradientMethod::regression);
}

// Distance along d from x (inside the box) to the box surface.
double box_exit(const cr::Box3& b, const cr::Vec3& x, const cr::Vec3& d) {
    double t = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
        if (d[a] > 0) t = std::min(t, (b.hi[a] - x[a]) / d[a]);
        if (d[a] < 0) t = std::min(t, (b.lo[a] - x[a]) / d[a]);
    }
    return t;
}

}  // namespace

TEST(Trace, UniformMediaIsStraight) {
    const auto m = uniform_mesh();
    cr::oracle::Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        const cr::Vec3 o = rng.in_box({2, 2, 2}, {18, 18, 18});
        const cr::Vec3 d = rng.unit_vector();
        const auto p = cr::trace(m, o, d, {});
        EXPECT_EQ(p.termination, cr::Termination::exited);
        const double t = box_exit(m.bounds(), o, d);
        EXPECT_NEAR(cr::distance(p.end_point, o + d * t), 0.0, 1e-9 * 20.0);
        EXPECT_NEAR(p.total_travel, t, 1e-9 * 20.0);
        double sum = 0.0;
        for (const auto& s : p.segments) sum += s.length;
        EXPECT_NEAR(sum, p.total_travel, 1e-12 * t);
    }
}

TEST(Trace, PathIsContinuous) {
    const auto m = random_mesh(3, 300, [](const cr::Vec3& x) { return 340.0 + 0.5 * x.z + 0.2 * x.x; });
    cr::oracle::Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        const auto p = cr::trace(m, rng.in_box({3, 3, 3}, {17, 17, 17}), rng.unit_vector(), {});
        for (std::size_t k = 1; k < p.segments.size(); ++k) {
            EXPECT_NEAR(cr::distance(p.segments[k - 1].exit, p.segments[k].entry), 0.0, 1e-9 * 20.0);
            const auto& prev = p.segments[k - 1].curve;
            const cr::Vec3 t_out = prev.tangent_at(prev.param_end);
            EXPECT_NEAR(cr::distance(t_out, p.segments[k].curve.direction), 0.0, 1e-9);
        }
    }
}

TEST(Trace, WallReflectionIsSpecular) {
    auto m = uniform_mesh(5);
    cr::BoundaryScene wall;
    wall.triangles.push_back({{cr::Vec3{15, -1, -1}, cr::Vec3{15, 41, -1}, cr::Vec3{15, -1, 41}}, 9});
    cr::link_boundary(m, wall);
    const cr::Vec3 d = normalized(cr::Vec3{1.0, 0.3, 0.2});
    const auto p = cr::trace(m, {5, 5, 5}, d, {});
    ASSERT_EQ(p.events.size(), 1u);
    const auto& ev = p.events[0];
    EXPECT_EQ(ev.surface_id, 9);
    EXPECT_NEAR(ev.position.x, 15.0, 1e-9);
    EXPECT_NEAR(ev.reflected.x, -ev.incident.x, 1e-12);
    EXPECT_NEAR(ev.reflected.y, ev.incident.y, 1e-12);
    EXPECT_NEAR(ev.reflected.z, ev.incident.z, 1e-12);
    EXPECT_NEAR(norm(ev.reflected), 1.0, 1e-12);
    EXPECT_NEAR(ev.travel, 10.0 / d.x, 1e-9);
    EXPECT_EQ(p.termination, cr::Termination::exited);
}

TEST(Trace, AbsorbingSurfaceStopsRay) {
    auto m = uniform_mesh(6);
    auto scene = cr::make_ground_plane(m.bounds(), 4.0, 2, false);
    cr::link_boundary(m, scene);
    const auto p = cr::trace(m, {10, 10, 10}, normalized(cr::Vec3{0.2, 0.1, -1}), {});
    EXPECT_EQ(p.termination, cr::Termination::absorbed);
    ASSERT_EQ(p.events.size(), 1u);
    EXPECT_NEAR(p.end_point.z, 4.0, 1e-9);
}

TEST(Trace, MaxDepthStopsAfterConfiguredReflections) {
    auto m = uniform_mesh(7);
    cr::BoundaryScene scene = cr::make_ground_plane(m.bounds(), 2.0, 1);
    auto top = cr::make_ground_plane(m.bounds(), 18.0, 2);
    for (auto t : top.triangles) scene.triangles.push_back(t);
    cr::link_boundary(m, scene);
    cr::TraceConfig cfg;
    cfg.max_reflections = 2;
    const auto p = cr::trace(m, {1, 10, 10}, normalized(cr::Vec3{0.05, 0.0, -1}), cfg);
    EXPECT_EQ(p.termination, cr::Termination::max_depth);
    EXPECT_EQ(p.events.size(), 3u);
}

TEST(Trace, MaxTravelClipsPath) {
    const auto m = uniform_mesh(8);
    cr::TraceConfig cfg;
    cfg.max_travel = 3.5;
    const auto p = cr::trace(m, {10, 10, 10}, {1, 0, 0}, cfg);
    EXPECT_EQ(p.termination, cr::Termination::max_travel);
    EXPECT_DOUBLE_EQ(p.total_travel, 3.5);
    EXPECT_NEAR(p.end_point.x, 13.5, 1e-9);
}

TEST(Trace, MaxCellsReportsTrapped) {
    const auto m = uniform_mesh(9);
    cr::TraceConfig cfg;
    cfg.max_cells = 2;
    const auto p = cr::trace(m, {1, 10, 10}, {1, 0, 0}, cfg);
    EXPECT_EQ(p.termination, cr::Termination::trapped);
    EXPECT_LE(p.segments.size(), 2u);
    EXPECT_FALSE(p.diagnostic.empty());
}

TEST(Trace, OriginOutsideThrows) {
    const auto m = uniform_mesh(10);
    EXPECT_THROW(cr::trace(m, {-1, 5, 5}, {1, 0, 0}, {}), cr::OutsideDomainError);
}

TEST(Trace, HintDoesNotChangeResult) {
    const auto m = random_mesh(11, 300, [](const cr::Vec3& x) { return 340.0 + 0.5 * x.z; });
    const auto dirs = cr::sphere_fan(40);
    const cr::Vec3 o{10, 10, 10};
    const auto chained = cr::trace_fan(m, o, dirs, {});
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        int hint = static_cast<int>((i * 37) % m.tet_count());
        const auto p = cr::trace(m, o, dirs[i], {}, &hint);
        EXPECT_EQ(p.cell_sequence(), chained[i].cell_sequence());
        EXPECT_EQ(p.end_point, chained[i].end_point);
    }
}

TEST(Trace, ReversedRayRetracesCells) {
    const auto m = random_mesh(12, 300, [](const cr::Vec3& x) { return 340.0 + 0.8 * x.z - 0.3 * x.y; });
    cr::oracle::Rng rng(13);
    int checked = 0;
    for (int i = 0; i < 30; ++i) {
        const cr::Vec3 o = rng.in_box({4, 4, 4}, {16, 16, 16});
        const auto fwd = cr::trace(m, o, rng.unit_vector(), {});
        if (fwd.segments.size() < 3 || fwd.nudges > 0) continue;
        // Start just inside the last cell so location is unambiguous.
        const auto& last = fwd.segments.back();
        const double back = 1e-6 * last.length;
        const cr::Vec3 start = last.curve.point(last.curve.param_end - back * last.curve.param_per_length());
        cr::TraceConfig cfg;
        cfg.max_travel = fwd.total_travel - back;
        const auto rev = cr::trace(m, start, -last.curve.tangent_at(last.curve.param_end), cfg);
        auto cells = fwd.cell_sequence();
        std::reverse(cells.begin(), cells.end());
        EXPECT_EQ(rev.cell_sequence(), cells);
        EXPECT_NEAR(cr::distance(rev.end_point, o), 0.0, 1e-6);
        ++checked;
    }
    EXPECT_GT(checked, 10);
}

TEST(Trace, UpwardRefractionBendsAwayFromGround) {
    const auto m = stratified_mesh(-1.0, true);
    const cr::Vec3 src{40, 40, 2};
    for (double elev : {-0.02, 0.0, 0.02, 0.05}) {
        const auto p = cr::trace(m, src, {std::cos(elev), 0.0, std::sin(elev)}, {});
        EXPECT_TRUE(p.events.empty());
        double zmin = src.z;
        for (const auto& s : p.segments) zmin = std::min(zmin, s.exit.z);
        EXPECT_GT(p.end_point.z, zmin + 0.05);
        const auto pts = p.polyline(4);
        std::size_t lowest = 0;
        for (std::size_t k = 1; k < pts.size(); ++k)
            if (pts[k].z < pts[lowest].z) lowest = k;
        for (std::size_t k = lowest + 1; k < pts.size(); ++k) EXPECT_GE(pts[k].z, pts[k - 1].z - 1e-9);
    }
}

TEST(Trace, DownwardRefractionBouncesRepeatedly) {
    // Long shallow domain: a hop from a 0.5 m apex is about 44 m at b = 1.
    cr::StratifiedProfile prof({1.0, 340.0, 1.0});
    const auto g = cr::bake_grid(prof, {161, 9, 9}, {}, {1, 1, 1}, cr::Quantity::speed);
    const auto m = cr::build_mesh(g, cr::desk_ground(g), 0.001, cr::GradientMethod::regression);
    cr::TraceConfig cfg;
    cfg.max_reflections = 20;
    const auto p = cr::trace(m, {1, 4, 0.5}, {1, 0, 0}, cfg);
    ASSERT_GE(p.events.size(), 3u);
    std::vector<double> hops;
    for (std::size_t k = 1; k < p.events.size(); ++k) hops.push_back(p.events[k].position.x - p.events[k - 1].position.x);
    for (double h : hops) EXPECT_NEAR(h, hops.front(), 0.1 * hops.front());
    for (const auto& e : p.events) EXPECT_NEAR(e.position.z, 0.0, 1e-9);
}

TEST(Trace, SymmetricFanGivesMirrorPaths) {
    const auto m = random_mesh(14, 0, [](const cr::Vec3& x) { return 340.0 + 0.5 * x.z; });
    const auto fan = cr::elevation_fan({0.3, 0.3}, 0.0);
    const cr::Vec3 a = fan[0];
    const cr::Vec3 b{-a.x, a.y, a.z};
    const auto pa = cr::trace(m, {10, 10, 10}, a, {});
    const auto pb = cr::trace(m, {10, 10, 10}, b, {});
    EXPECT_NEAR(pa.end_point.x - 10.0, -(pb.end_point.x - 10.0), 1e-6);
    EXPECT_NEAR(pa.end_point.z, pb.end_point.z, 1e-6);
}

TEST(Fans, DirectionsAreUnitVectors) {
    for (const auto& d : cr::sphere_fan(100)) EXPECT_NEAR(norm(d), 1.0, 1e-12);
    const auto e = cr::elevation_fan({0.0, std::numbers::pi / 2}, std::numbers::pi / 2);
    EXPECT_NEAR(e[0].y, 1.0, 1e-12);
    EXPECT_NEAR(e[1].z, 1.0, 1e-12);
}
