#include <benchmark/benchmark.h>

#include "curvedray/ray_curves.hpp"
#include "curvedray/reference_stepper.hpp"
#include "curvedray/scenarios.hpp"
#include "curvedray/traversal.hpp"

namespace {

using namespace curvedray;

struct Desk {
    DeskConfig cfg;
    StratifiedProfile profile;
    MediaGrid grid;
    BoundaryScene ground;
    AdaptiveMesh mesh;

    Desk() : cfg(make_cfg()), profile(desk_profile(cfg)) {
        grid = desk_grid(profile, cfg);
        ground = desk_ground(grid);
        mesh = build_mesh(grid, ground, 0.001, GradientMethod::regression);
    }
    static DeskConfig make_cfg() {
        DeskConfig c;
        c.fluctuation = false;
        return c;
    }
};

const Desk& desk() {
    static const Desk d;
    return d;
}

void BM_MakeSegment(benchmark::State& state) {
    const auto g = CellGradient::from({0.1, -0.3, 1.0});
    Vec3 dir = normalized(Vec3{1.0, 0.2, 0.1});
    for (auto _ : state) {
        auto s = make_segment({1, 2, 3}, dir, g, 340.0, Quantity::speed);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_MakeSegment);

void BM_IntersectPlane(benchmark::State& state) {
    const auto s = make_segment({0, 0, 0}, normalized(Vec3{1.0, 0.0, 0.2}), CellGradient::from({0, 0, 1}), 340.0,
                                Quantity::speed);
    const Vec3 n = normalized(Vec3{1.0, 0.1, 0.0});
    for (auto _ : state) {
        auto p = s.intersect_plane(n, -5.0, 0.0, Crossing::any);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_IntersectPlane);

void BM_TraceDeskFan(benchmark::State& state) {
    const auto& d = desk();
    const auto dirs = sphere_fan(static_cast<int>(state.range(0)));
    TraceConfig tc;
    tc.max_reflections = 3;
    for (auto _ : state) {
        auto paths = trace_fan(d.mesh, desk_source(d.grid), dirs, tc);
        benchmark::DoNotOptimize(paths);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TraceDeskFan)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_StepDeskRay(benchmark::State& state) {
    const auto& d = desk();
    ProfileMedia media(d.profile, d.grid.bounds());
    StepperConfig sc;
    sc.step_size = 1.0 / static_cast<double>(state.range(0));
    sc.integrator = Integrator::euler;
    sc.limits.max_reflections = 3;
    sc.limits.max_cells = 100'000'000;
    sc.record_polyline = false;
    for (auto _ : state) {
        auto p = step_trace(media, d.ground, desk_source(d.grid), normalized(Vec3{1.0, 0.3, -0.2}), sc);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_StepDeskRay)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
