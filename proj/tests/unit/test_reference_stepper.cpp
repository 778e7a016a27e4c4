#include <cmath>

#include <gtest/gtest.h>

#include "curvedray/error.hpp"
#include "curvedray/gradient.hpp"
#include "curvedray/ray_curves.hpp"
#include "curvedray/reference_stepper.hpp"
#include "curvedray/scenarios.hpp"
#include "oracles.hpp"

namespace cr = curvedray;

namespace {

const cr::Box3 kBigBox{{-1000, -1000, -60}, {1000, 1000, 1000}};

// Endpoint after exactly `length / ds` steps, compared with the exact circle.
double circle_error(cr::Integrator integ, double ds) {
    const double g = 5.0, length = 60.0;
    cr::LinearSpeedProfile prof(340.0, {0, 0, g});
    cr::ProfileMedia media(prof, kBigBox);
    const cr::Vec3 d = normalized(cr::Vec3{1, 0, 0.3});
    cr::StepperConfig cfg;
    cfg.step_size = ds;
    cfg.integrator = integ;
    cfg.limits.max_cells = static_cast<std::size_t>(std::llround(length / ds));
    cfg.record_polyline = false;
    const auto p = cr::step_trace(media, {}, {0, 0, 0}, d, cfg);
    const auto seg = cr::make_segment({0, 0, 0}, d, cr::CellGradient::from({0, 0, g}), 340.0, cr::Quantity::speed);
    return cr::distance(p.end_point, seg.point(length));
}

}  // namespace

TEST(Stepper, UniformMediaIsStraight) {
    cr::ConstantProfile prof(1.0, 340.0);
    const cr::Box3 box{{0, 0, 0}, {10, 10, 10}};
    cr::ProfileMedia media(prof, box);
    cr::oracle::Rng rng(1);
    for (auto integ : {cr::Integrator::euler, cr::Integrator::rk4}) {
        for (int i = 0; i < 20; ++i) {
            const cr::Vec3 o = rng.in_box({1, 1, 1}, {9, 9, 9});
            const cr::Vec3 d = rng.unit_vector();
            cr::StepperConfig cfg;
            cfg.step_size = 0.37;
            cfg.integrator = integ;
            const auto p = cr::step_trace(media, {}, o, d, cfg);
            EXPECT_EQ(p.termination, cr::Termination::exited);
            double t = 1e300;
            for (int a = 0; a < 3; ++a) {
                if (d[a] > 0) t = std::min(t, (box.hi[a] - o[a]) / d[a]);
                if (d[a] < 0) t = std::min(t, (box.lo[a] - o[a]) / d[a]);
            }
            EXPECT_NEAR(cr::distance(p.end_point, o + d * t), 0.0, 1e-9);
        }
    }
}

TEST(Stepper, EulerIsFirstOrder) {
    std::vector<double> h, e;
    for (double ds : {0.5, 0.25, 0.125, 0.0625}) {
        h.push_back(ds);
        e.push_back(circle_error(cr::Integrator::euler, ds));
    }
    EXPECT_NEAR(cr::oracle::log_log_slope(h, e), 1.0, 0.15);
}

TEST(Stepper, Rk4IsFourthOrder) {
    std::vector<double> h, e;
    for (double ds : {4.0, 2.0, 1.0, 0.5}) {
        h.push_back(ds);
        e.push_back(circle_error(cr::Integrator::rk4, ds));
    }
    EXPECT_NEAR(cr::oracle::log_log_slope(h, e), 4.0, 0.3);
}

TEST(Stepper, MatchesIndependentIntegrator) {
    cr::StratifiedProfile prof({-1.0, 340.0, 1.0}, cr::FluctuationField::random(2, 6, 20, 60, 1e-3));
    cr::ProfileMedia media(prof, {{0, 0, 0}, {80, 80, 80}});
    const cr::Vec3 d = normalized(cr::Vec3{1, 0.2, 0.1});
    cr::StepperConfig cfg;
    cfg.step_size = 0.05;
    cfg.limits.max_cells = 600;
    const auto p = cr::step_trace(media, {}, {5, 5, 5}, d, cfg);
    auto n = [&](const cr::Vec3& x) { return prof.index(x); };
    auto gn = [&](const cr::Vec3& x) { return prof.index_gradient(x); };
    const auto ref = cr::oracle::integrate_ray(n, gn, {{5, 5, 5}, d * prof.index({5, 5, 5})}, 30.0, 3000);
    EXPECT_NEAR(cr::distance(p.end_point, ref.x), 0.0, 1e-6);
}

TEST(Stepper, ReflectsOffGround) {
    cr::ConstantProfile prof(1.0, 340.0);
    const cr::Box3 box{{0, 0, 0}, {20, 20, 20}};
    cr::ProfileMedia media(prof, box);
    const auto ground = cr::make_ground_plane(box, 0.0);
    cr::StepperConfig cfg;
    cfg.step_size = 0.3;
    const cr::Vec3 d = normalized(cr::Vec3{1, 0, -1});
    const auto p = cr::step_trace(media, ground, {2, 10, 5}, d, cfg);
    ASSERT_EQ(p.events.size(), 1u);
    EXPECT_NEAR(p.events[0].position.x, 7.0, 1e-9);
    EXPECT_NEAR(p.events[0].position.z, 0.0, 1e-12);
    EXPECT_NEAR(p.events[0].reflected.z, -d.z, 1e-12);

    auto absorbing = cr::make_ground_plane(box, 0.0, 0, false);
    const auto q = cr::step_trace(media, absorbing, {2, 10, 5}, d, cfg);
    EXPECT_EQ(q.termination, cr::Termination::absorbed);
}

TEST(Stepper, RejectsBadInput) {
    cr::ConstantProfile prof;
    cr::ProfileMedia media(prof, {{0, 0, 0}, {1, 1, 1}});
    cr::StepperConfig cfg;
    cfg.step_size = 0.0;
    EXPECT_THROW(cr::step_trace(media, {}, {0.5, 0.5, 0.5}, {1, 0, 0}, cfg), cr::DomainError);
    cfg.step_size = 0.1;
    EXPECT_THROW(cr::step_trace(media, {}, {2, 0.5, 0.5}, {1, 0, 0}, cfg), cr::OutsideDomainError);
    EXPECT_EQ(cr::parse_integrator("euler"), cr::Integrator::euler);
    EXPECT_THROW(cr::parse_integrator("leapfrog"), cr::FormatError);
}

TEST(Converged, UniformMediaConvergesImmediately) {
    cr::ConstantProfile prof;
    cr::ProfileMedia media(prof, {{0, 0, 0}, {10, 10, 10}});
    std::vector<cr::ConvergenceStep> history;
    cr::StepperConfig cfg;
    cfg.step_size = 1.0;
    cr::converged_trace(media, {}, {5, 5, 5}, normalized(cr::Vec3{1, 1, 0.5}), 1e-6, cfg, 16, &history);
    EXPECT_EQ(history.size(), 2u);
}

TEST(Converged, StartingStepDoesNotMatter) {
    cr::DeskConfig dc;
    dc.fluctuation = false;
    const auto prof = cr::desk_profile(dc);
    cr::ProfileMedia media(prof, {{0, 0, 0}, {80, 80, 80}});
    const cr::Vec3 d = normalized(cr::Vec3{1, 0.3, 0.05});
    const double tol = 1e-6;
    cr::StepperConfig a, b;
    a.step_size = 1.0;
    b.step_size = 2.0;
    a.record_polyline = b.record_polyline = false;
    std::vector<cr::ConvergenceStep> ha;
    const auto pa = cr::converged_trace(media, {}, {5, 5, 10}, d, tol, a, 12, &ha);
    const auto pb = cr::converged_trace(media, {}, {5, 5, 10}, d, tol, b, 13);
    EXPECT_LE(ha.size(), 13u);
    EXPECT_LE(cr::distance(pa.end_point, pb.end_point), 2 * tol);
}

TEST(Converged, ThrowsWithHistoryWhenUnconverged) {
    cr::LinearSpeedProfile prof(340.0, {0, 0, 2.0});
    cr::ProfileMedia media(prof, {{-100, -100, -50}, {100, 100, 100}});
    cr::StepperConfig cfg;
    cfg.step_size = 4.0;
    try {
        cr::converged_trace(media, {}, {0, 0, 0}, {1, 0, 0}, 1e-14, cfg, 2);
        FAIL() << "expected ConvergenceError";
    } catch (const cr::ConvergenceError& e) {
        EXPECT_NE(std::string(e.what()).find("changes"), std::string::npos);
    }
}

TEST(MediaSources, GridAndMeshAgreeWithProfile) {
    cr::LinearSpeedProfile prof(340.0, {0.2, 0.0, 0.5});
    const auto g = cr::bake_grid(prof, {6, 6, 6}, {}, {2, 2, 2}, cr::Quantity::speed);
    cr::GridMedia gm(g);
    cr::oracle::Rng rng(6);
    for (int i = 0; i < 100; ++i) {
        const cr::Vec3 x = rng.in_box({0.1, 0.1, 0.1}, {9.9, 9.9, 9.9});
        // n = c0 / c is interpolated from nodes: error bound h^2 / 8 |n''| per axis.
        EXPECT_NEAR(gm.index(x), prof.index(x), 3.0 * 0.5 * 2.0 * std::pow(0.54 / 340.0, 2));
        const double h = 1e-6;
        for (int a = 0; a < 3; ++a) {
            cr::Vec3 e;
            e[a] = h;
            EXPECT_NEAR(gm.index_gradient(x)[a], (gm.index(x + e) - gm.index(x - e)) / (2 * h), 1e-7);
        }
    }
    auto mesh = cr::build_mesh(g, {}, 0.001, cr::GradientMethod::regression);
    cr::MeshMedia mm(mesh);
    for (int i = 0; i < 100; ++i) {
        const cr::Vec3 x = rng.in_box({0.1, 0.1, 0.1}, {9.9, 9.9, 9.9});
        EXPECT_NEAR(mm.index(x), prof.index(x), 1e-5);
    }
}

TEST(Stepper, AgreesWithCurvedTracerInFlatMedia) {
    cr::ConstantProfile prof(1.0, 340.0);
    const auto g = cr::bake_grid(prof, {5, 5, 5}, {}, {5, 5, 5}, cr::Quantity::speed);
    const auto mesh = cr::build_mesh(g, cr::desk_ground(g), 0.001, cr::GradientMethod::regression);
    cr::MeshMedia media(mesh);
    cr::StepperConfig cfg;
    cfg.step_size = 0.7;
    cr::oracle::Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        const cr::Vec3 o = rng.in_box({2, 2, 2}, {18, 18, 18});
        const cr::Vec3 d = rng.unit_vector();
        const auto a = cr::trace(mesh, o, d, {});
        const auto b = cr::step_trace(media, mesh.scene, o, d, cfg);
        EXPECT_NEAR(cr::distance(a.end_point, b.end_point), 0.0, 1e-9);
        EXPECT_EQ(a.events.size(), b.events.size());
    }
}
