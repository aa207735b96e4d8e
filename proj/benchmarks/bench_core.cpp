// Hot kernels at the grid sizes the acceptance runs use.

#include <benchmark/benchmark.h>

#include "stiffpme/hele_shaw.hpp"
#include "stiffpme/level_set.hpp"
#include "stiffpme/pme.hpp"

using namespace stiffpme;

namespace {

DriftModel rotation_with_source() {
    PresetParams p;
    p.omega = 1.0;
    p.source = 1.0;
    return make_drift("rotation", 2, p);
}

ScalarField disk_phi(const GridSpec& g, double r) {
    return ScalarField::sample(g, [r](Vec2 x) { return norm(x) - r; });
}

void BM_PmeExplicitStep(benchmark::State& state) {
    const GridSpec g = GridSpec::box(2, static_cast<int>(state.range(0)), -1.0, 1.0);
    RegularData d;
    d.disks.push_back({{0.0, 0.0}, 0.3});
    d.bumps.push_back({{0.5, 0.0}, 0.2, 0.6});
    const PmeStepper stepper(g, rotation_with_source(), 20.0);
    const PmeState s0{d.sample(g).compose(), 20.0, 0.0};
    const double dt = 0.9 * stepper.stability_bound(s0.rho);
    for (auto _ : state) benchmark::DoNotOptimize(stepper.step(s0, dt));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_PmeExplicitStep)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);

void BM_PressureSolve(benchmark::State& state) {
    const GridSpec g = GridSpec::box(2, static_cast<int>(state.range(0)), -1.0, 1.0);
    const ScalarField phi = disk_phi(g, 0.5);
    const DriftModel model = rotation_with_source();
    for (auto _ : state) benchmark::DoNotOptimize(solve_pressure(phi, model));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_PressureSolve)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_Reinitialize(benchmark::State& state) {
    const GridSpec g = GridSpec::box(2, static_cast<int>(state.range(0)), -1.0, 1.0);
    // A cone scaled unevenly, so the sweeps have real work to do.
    const ScalarField phi = ScalarField::sample(g, [](Vec2 x) { return (norm(x) - 0.4) * (1.5 + x.x); });
    for (auto _ : state) benchmark::DoNotOptimize(reinitialize(phi));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}
BENCHMARK(BM_Reinitialize)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
