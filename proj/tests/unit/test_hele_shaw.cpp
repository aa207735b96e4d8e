#include <gtest/gtest.h>

#include <cmath>

#include "stiffpme/geometry.hpp"
#include "stiffpme/hele_shaw.hpp"
#include "stiffpme/level_set.hpp"

using namespace stiffpme;

namespace {

DriftModel source_only(double f, Vec2 velocity = {0.0, 0.0}) {
    PresetParams p;
    p.source = f;
    p.velocity = velocity;
    return make_drift("constant", 2, p);
}

ScalarField disk_phi(const GridSpec& g, Vec2 c, double r) {
    return ScalarField::sample(g, [=](Vec2 x) { return norm(x - c) - r; });
}

Vec2 mask_centroid(const Mask& m) {
    Vec2 s{0.0, 0.0};
    for (std::size_t k = 0; k < m.size(); ++k) {
        if (m[k]) s = s + m.grid().center(k);
    }
    return (1.0 / static_cast<double>(m.count())) * s;
}

void expect_state_invariants(const HsState& s) {
    EXPECT_TRUE(s.omega == sublevel_mask(s.phi));
    for (std::size_t k = 0; k < s.p.size(); ++k) {
        EXPECT_GE(s.p[k], 0.0);
        if (!s.omega[k]) {
            EXPECT_EQ(s.p[k], 0.0);
            EXPECT_LT(s.rhoE[k], 1.0);
        }
    }
}

}  // namespace

TEST(SolvePressure, EmptyMaskGivesZero) {
    const GridSpec g = GridSpec::box(2, 16, -1.0, 1.0);
    const ScalarField p = solve_pressure(Mask(g), source_only(1.0));
    EXPECT_EQ(p.max(), 0.0);
    EXPECT_EQ(p.min(), 0.0);
}

TEST(SolvePressure, IntervalMatchesTheParabolaAtSecondOrder) {
    const double R = 0.5, c = 2.0;
    auto err = [&](int n) {
        const GridSpec g = GridSpec::line(n, 2.0 / n, -1.0);
        PresetParams pp;
        pp.source = c;
        const ScalarField phi = ScalarField::sample(g, [R](Vec2 x) { return std::abs(x.x) - R; });
        const ScalarField p = solve_pressure(phi, make_drift("constant", 1, pp));
        double worst = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double x = g.center(k).x;
            if (std::abs(x) < R) worst = std::max(worst, std::abs(p[k] - c * (R * R - x * x) / 2.0));
        }
        return worst;
    };
    const double e1 = err(64), e2 = err(128);
    EXPECT_LE(e1, 0.1 * (2.0 / 64) * (2.0 / 64) * 100.0);
    EXPECT_GE(e1 / e2, 3.0);
}

TEST(SolvePressure, DiskCentreValue) {
    const GridSpec g = GridSpec::box(2, 128, -1.0, 1.0);
    PressureSolveInfo info;
    const ScalarField p = solve_pressure(disk_phi(g, {0.0, 0.0}, 0.5), source_only(1.5), {}, nullptr, &info);
    EXPECT_NEAR(interpolate(p, {0.0, 0.0}) / (1.5 * 0.25 / 4.0), 1.0, 0.02);
    EXPECT_LE(info.residual, 1e-8);
}

TEST(SolvePressure, PositiveOnInteriorCellsAndZeroOutside) {
    const GridSpec g = GridSpec::box(2, 48, -1.0, 1.0);
    const ScalarField phi = ScalarField::sample(
        g, [](Vec2 x) { return std::min(norm(x - Vec2{-0.3, 0.0}) - 0.25, norm(x - Vec2{0.35, 0.1}) - 0.2); });
    const ScalarField p = solve_pressure(phi, source_only(1.0));
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (phi[k] < -g.h()) {
            EXPECT_GT(p[k], 0.0);
        } else if (phi[k] > 0.0) {
            EXPECT_EQ(p[k], 0.0);
        }
    }
}

TEST(SolvePressure, MaskFormAgreesWithTheLevelSetForm) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    const ScalarField phi = disk_phi(g, {0.0, 0.0}, 0.4);
    const ScalarField a = solve_pressure(phi, source_only(1.0));
    const ScalarField b = solve_pressure(sublevel_mask(phi), source_only(1.0));
    EXPECT_NEAR(a.max() / b.max(), 1.0, 0.05);
}

TEST(SolvePressure, RejectsNonPositiveSourceOnTheSet) {
    const GridSpec g = GridSpec::box(2, 16, -1.0, 1.0);
    EXPECT_THROW(solve_pressure(disk_phi(g, {0.0, 0.0}, 0.4), source_only(0.0)), InvalidInput);
}

TEST(SolvePressure, IterationCapRaisesSolverErrorWithResidual) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    PressureOptions opts;
    opts.max_iterations = 3;
    opts.sor_budget = 3;
    try {
        solve_pressure(disk_phi(g, {0.0, 0.0}, 0.6), source_only(1.0), opts);
        FAIL() << "expected a solver error";
    } catch (const SolverError& e) {
        EXPECT_GT(e.residual(), 1e-8);
    }
}

TEST(FrontVelocity, ZeroPressureWithoutDriftIsStill) {
    const GridSpec g = GridSpec::box(2, 32, -1.0, 1.0);
    const ScalarField phi = disk_phi(g, {0.0, 0.0}, 0.4);
    HsState s{phi, sublevel_mask(phi), ScalarField(g), ScalarField(g), 0.0, 0};
    const ScalarField v = front_velocity(s, source_only(1.0));
    EXPECT_EQ(v.max(), 0.0);
    EXPECT_EQ(v.min(), 0.0);
}

TEST(FrontVelocity, ZeroPressureUnderConstantDriftIsTheNormalComponent) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    const Vec2 b{0.6, -0.2};
    const ScalarField phi = disk_phi(g, {0.0, 0.0}, 0.4);
    HsState s{phi, sublevel_mask(phi), ScalarField(g), ScalarField(g), 0.0, 0};
    const ScalarField v = front_velocity(s, source_only(1.0, b));
    const Mask& omega = s.omega;
    int interface_cells = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        bool edge = false;
        for_each_neighbor(g, k, [&](std::size_t nb, int, int) { edge = edge || (omega[k] && !omega[nb]); });
        if (edge) {
            const Vec2 nu = level_set_normal(phi, k);
            EXPECT_NEAR(v[k], dot(b, nu), 1e-6);
            ++interface_cells;
        } else {
            // Band cells carry a copied interface value.
            EXPECT_LE(std::abs(v[k]), norm(b) + 1e-12);
        }
    }
    EXPECT_GT(interface_cells, 0);
}

TEST(FrontVelocity, RadialPatchMovesAtCROverTwo) {
    const GridSpec g = GridSpec::box(2, 128, -1.0, 1.0);
    const double R = 0.4, c = 1.0;
    HeleShawSolver solver(g, source_only(c), [](Vec2) { return 0.0; });
    const HsState s = solver.initial_state(disk_phi(g, {0.0, 0.0}, R));
    const ScalarField v = front_velocity(s, solver.model(), solver.options());
    double sum = 0.0;
    int count = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (std::abs(s.phi[k]) < 0.5 * g.h()) {
            sum += v[k];
            ++count;
        }
    }
    ASSERT_GT(count, 0);
    EXPECT_NEAR(sum / count / (c * R / 2.0), 1.0, 0.05);
}

TEST(Advance, DiskGrowsExponentially) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    HeleShawSolver solver(g, source_only(1.0), [](Vec2) { return 0.0; });
    const HsRun run = solver.run(solver.initial_state(disk_phi(g, {0.0, 0.0}, 0.3)), 0.5, {0.25});
    ASSERT_EQ(run.frames.size(), 3u);
    for (const auto& f : run.frames) {
        const double r = mean_contour_radius(contour(f.phi), {0.0, 0.0});
        EXPECT_NEAR(r / (0.3 * std::exp(f.time / 2.0)), 1.0, 0.02) << "t = " << f.time;
        expect_state_invariants(f);
    }
}

TEST(Advance, NearlyZeroSourceTranslatesTheSet) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    const Vec2 b{0.5, 0.25};
    HeleShawSolver solver(g, source_only(1e-3, b), [](Vec2) { return 0.0; });
    const HsState s0 = solver.initial_state(disk_phi(g, {-0.2, -0.1}, 0.25));
    const HsRun run = solver.run(s0, 0.4, {});
    const Vec2 c0 = mask_centroid(s0.omega);
    const Vec2 c1 = mask_centroid(run.frames.back().omega);
    EXPECT_NEAR(c1.x - c0.x, 0.4 * b.x, g.h());
    EXPECT_NEAR(c1.y - c0.y, 0.4 * b.y, g.h());
}

TEST(Advance, RejectsAStepAboveTheFrontCfl) {
    const GridSpec g = GridSpec::box(2, 32, -1.0, 1.0);
    HeleShawSolver solver(g, source_only(1.0, {2.0, 0.0}), [](Vec2) { return 0.0; });
    const HsState s0 = solver.initial_state(disk_phi(g, {0.0, 0.0}, 0.3));
    EXPECT_THROW(solver.advance(s0, 10.0 * g.h()), InvalidInput);
}

TEST(Advance, ExteriorBumpNucleatesANewComponent) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    HsOptions opts;
    opts.dt_max = 0.002;
    const Bump bump{{0.4, 0.0}, 0.25, 0.9};
    HeleShawSolver solver(g, source_only(1.0), [bump](Vec2 x) { return bump(x); }, opts);
    const HsRun run = solver.run(solver.initial_state(disk_phi(g, {-0.4, 0.0}, 0.2)), 0.15, {0.05, 0.1});
    const NucleationEvent* first = nullptr;
    for (const auto& e : run.events) {
        if (e.new_component) {
            first = &e;
            break;
        }
    }
    ASSERT_NE(first, nullptr);
    EXPECT_NEAR(first->time / std::log(10.0 / 9.0), 1.0, 0.2);
    EXPECT_NEAR(first->centroid.x, 0.4, 2 * g.h());
    for (const auto& f : run.frames) expect_state_invariants(f);
}

TEST(Advance, MassLedgerBalancesOnASmoothRun) {
    const GridSpec g = GridSpec::box(2, 128, -1.0, 1.0);
    HeleShawSolver solver(g, source_only(1.0), [](Vec2 x) { return 0.3 * std::exp(-8.0 * dot(x, x)); });
    const HsRun run = solver.run(solver.initial_state(disk_phi(g, {0.0, 0.0}, 0.25)), 0.3, {0.1, 0.2});
    ASSERT_GE(run.mass_ledger.size(), 2u);
    const auto& a = run.mass_ledger.front();
    const auto& b = run.mass_ledger.back();
    double produced = 0.0;
    for (std::size_t k = 1; k < run.mass_ledger.size(); ++k) {
        const auto& l = run.mass_ledger[k - 1];
        const auto& r = run.mass_ledger[k];
        produced += 0.5 * (l.production + r.production) * (r.time - l.time);
    }
    const double stored = (b.congested_area + b.exterior_mass) - (a.congested_area + a.exterior_mass);
    // The imbalance is first order in h: about 3% at 64^2 and 1.2% at 128^2.
    EXPECT_NEAR(stored / produced, 1.0, 0.02);
}

TEST(LimitDensity, PiecewiseDefinition) {
    const GridSpec g = GridSpec::box(2, 16, -1.0, 1.0);
    const ScalarField phi = disk_phi(g, {0.0, 0.0}, 0.5);
    const Mask m = sublevel_mask(phi);
    ScalarField rhoE(g);
    for (std::size_t k = 0; k < g.size(); ++k) rhoE[k] = m[k] ? 0.0 : 0.3;
    const ScalarField rho = limit_density({phi, m, ScalarField(g), rhoE, 0.0, 0});
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(rho[k], m[k] ? 1.0 : 0.3);

    const ScalarField empty(g, 1.0);
    EXPECT_EQ(limit_density({empty, Mask(g), ScalarField(g), ScalarField(g), 0.0, 0}).max(), 0.0);
    const ScalarField full(g, -1.0);
    EXPECT_EQ(limit_density({full, Mask(g, true), ScalarField(g), ScalarField(g), 0.0, 0}).min(), 1.0);
}

TEST(Monotonicity, StaticSetHasNoViolations) {
    const GridSpec g = GridSpec::box(2, 32, -1.0, 1.0);
    const ScalarField phi = disk_phi(g, {0.0, 0.0}, 0.5);
    std::vector<HsState> frames;
    for (int k = 0; k < 5; ++k) frames.push_back({phi, sublevel_mask(phi), ScalarField(g), ScalarField(g), 0.1 * k, 0});
    const MonotonicityReport rep = streamline_monotonicity_check(frames, source_only(1.0), 30, 5);
    EXPECT_EQ(rep.violations, 0);
    EXPECT_EQ(rep.streamlines, 30);
}

TEST(Monotonicity, TranslatingPatchFollowsItsStreamlines) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    const DriftModel model = source_only(1e-3, {0.5, 0.0});
    HeleShawSolver solver(g, model, [](Vec2) { return 0.0; });
    std::vector<double> outs;
    for (int k = 1; k < 8; ++k) outs.push_back(0.05 * k);
    const HsRun run = solver.run(solver.initial_state(disk_phi(g, {-0.3, 0.0}, 0.3)), 0.4, outs);
    const MonotonicityReport rep = streamline_monotonicity_check(run.frames, model, 40, 9);
    EXPECT_GT(rep.streamlines, 0);
    EXPECT_LE(rep.fraction(), 0.02);
}

TEST(Monotonicity, FlagsAShrinkingSet) {
    // Negative control: frames that shrink the set without any drift violate monotonicity.
    const GridSpec g = GridSpec::box(2, 40, -1.0, 1.0);
    std::vector<HsState> frames;
    for (int k = 0; k < 5; ++k) {
        const ScalarField phi = disk_phi(g, {0.0, 0.0}, 0.6 - 0.12 * k);
        frames.push_back({phi, sublevel_mask(phi), ScalarField(g), ScalarField(g), 0.1 * k, 0});
    }
    const MonotonicityReport rep = streamline_monotonicity_check(frames, source_only(1.0), 40, 3);
    EXPECT_GT(rep.fraction(), 0.1);
}
