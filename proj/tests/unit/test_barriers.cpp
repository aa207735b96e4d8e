#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "stiffpme/barriers.hpp"
#include "stiffpme/geometry.hpp"
#include "stiffpme/hele_shaw.hpp"

using namespace stiffpme;

namespace {

DriftModel constant_model(double f, Vec2 velocity = {0.0, 0.0}) {
    PresetParams p;
    p.source = f;
    p.velocity = velocity;
    return make_drift("constant", 2, p);
}

DriftModel rotation_model(double omega, double f) {
    PresetParams p;
    p.omega = omega;
    p.source = f;
    return make_drift("rotation", 2, p);
}

DensityBarrier still_bump(double mu0) {
    DensityBarrier bar;
    bar.model = constant_model(0.0);
    bar.mu = [mu0](double) { return mu0; };
    bar.mu_prime = [](double) { return 0.0; };
    bar.r = 0.4;
    bar.x0 = {0.1, -0.2};
    return bar;
}

}  // namespace

TEST(DensityBarrier, PointEvaluations) {
    const DensityBarrier bar = still_bump(1.0);
    EXPECT_EQ(density_barrier_eval(bar, {0.9, 0.9}, 0.3), 0.0);
    EXPECT_DOUBLE_EQ(density_barrier_eval(bar, bar.x0, 0.0), 1.0);
    EXPECT_NEAR(density_barrier_eval(bar, bar.x0 + Vec2{0.2, 0.0}, 0.7), 0.75, 1e-14);
}

TEST(DensityBarrier, RidesAlongTheFlowAndShrinks) {
    DensityBarrier bar = still_bump(0.6);
    bar.model = rotation_model(1.0, 0.0);
    bar.L = 1.0;
    bar.x0 = {0.4, 0.0};
    const double t = 0.5;
    const Vec2 X{0.4 * std::cos(t), 0.4 * std::sin(t)};
    EXPECT_NEAR(density_barrier_eval(bar, X, t), 0.6, 1e-8);
    // The support radius is r e^{-Lt}.
    const double edge = bar.r * std::exp(-t);
    EXPECT_EQ(density_barrier_eval(bar, X + Vec2{edge * 1.001, 0.0}, t), 0.0);
    EXPECT_GT(density_barrier_eval(bar, X + Vec2{edge * 0.99, 0.0}, t), 0.0);
}

TEST(BarrierResidual, DecayingAmplitudeIsASubsolutionForLargeM) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    DensityBarrier bar = still_bump(0.5);
    const double delta = 0.1;
    bar.mu = [delta](double t) { return 0.5 * std::exp(-delta * t); };
    bar.mu_prime = [delta](double t) { return -delta * 0.5 * std::exp(-delta * t); };
    for (double t : {0.0, 0.5, 1.0}) {
        const BarrierResidual res = barrier_residual(bar, g, 64.0, t, 0.05);
        EXPECT_TRUE(res.passes) << "t = " << t;
        EXPECT_LE(res.worst, 1e-6);
        EXPECT_GT(res.evaluated, 0);
    }
}

TEST(BarrierResidual, GrowingSupersolutionStaysAbove) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    DensityBarrier bar;
    bar.model = constant_model(1.0);
    bar.profile = RadialProfile::kBumpUp;
    bar.mu = [](double t) { return 0.2 * std::exp(1.2 * t); };
    bar.mu_prime = [](double t) { return 0.24 * std::exp(1.2 * t); };
    bar.r = 1.0;
    ASSERT_FALSE(bar.is_subsolution());
    for (double t : {0.0, 0.3}) {
        const BarrierResidual res = barrier_residual(bar, g, 256.0, t, 0.05);
        EXPECT_TRUE(res.passes) << "t = " << t;
        EXPECT_GE(res.worst, -1e-6);
    }
}

TEST(BarrierResidual, SmallMIsReportedAsAViolation) {
    const GridSpec g = GridSpec::box(2, 48, -1.0, 1.0);
    DensityBarrier bar;
    bar.model = rotation_model(1.0, 1.0);
    bar.mu = [](double t) { return 0.5 * std::exp(0.5 * t); };
    bar.mu_prime = [](double t) { return 0.25 * std::exp(0.5 * t); };
    bar.r = 0.3;
    bar.L = 1.0;
    bar.x0 = {0.3, 0.0};
    const BarrierResidual low = barrier_residual(bar, g, 2.0, 0.0, 0.05);
    EXPECT_FALSE(low.passes);
    EXPECT_GT(low.worst, 1e-6);

    const std::vector<double> times{0.0, 0.1, 0.2};
    const double m0 = barrier_m0_prescan(bar, g, times, 0.05);
    ASSERT_GT(m0, 2.0);
    for (double t : times) EXPECT_TRUE(barrier_residual(bar, g, m0, t, 0.05).passes);
    EXPECT_FALSE(barrier_residual(bar, g, m0 / 2.0, 0.0, 0.05).passes && barrier_residual(bar, g, m0 / 2.0, 0.1, 0.05).passes &&
                 barrier_residual(bar, g, m0 / 2.0, 0.2, 0.05).passes);
}

TEST(PressureBarrier, PointEvaluations) {
    PressureBarrier bar;
    bar.model = constant_model(1.0);
    bar.mu = [](double) { return 0.2; };
    bar.mu_prime = [](double) { return 0.0; };
    bar.r = 0.5;
    bar.x0 = {0.1, 0.1};
    EXPECT_NEAR(pressure_barrier_eval(bar, bar.x0 + Vec2{0.5, 0.0}, 0.3), 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(pressure_barrier_eval(bar, bar.x0, 0.3), 0.2);
    EXPECT_NEAR(pressure_barrier_eval(bar, bar.x0 + Vec2{0.0, 0.25}, 0.3), 0.75 * 0.2, 1e-15);
}

TEST(PressureBarrier, HypothesesAreCheckedAndTheResidualIsNonpositive) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    PressureBarrier bar;
    bar.model = rotation_model(1.0, 1.0);
    bar.mu = [](double t) { return 0.005 * std::exp(t); };
    bar.mu_prime = [](double t) { return 0.005 * std::exp(t); };
    bar.r = 0.5;
    bar.L = 1.0;
    bar.x0 = {0.2, 0.0};
    bar.kappa = 0.5;
    EXPECT_TRUE(pressure_barrier_hypotheses(bar, 10.0, 0.5, 2).empty());
    for (double t : {0.0, 0.25, 0.5}) {
        const BarrierResidual res = pressure_barrier_residual(bar, g, 10.0, t);
        EXPECT_TRUE(res.passes);
        EXPECT_LE(res.worst, 1e-9);
    }
    bar.kappa = 0.9;  // above inf F / 2
    EXPECT_FALSE(pressure_barrier_hypotheses(bar, 10.0, 0.5, 2).empty());
}

TEST(RadialHs, NoExteriorDensityGivesAConstantSpeedFront) {
    const RadialHsSolution sol = radial_hs_solve(0.5, 0.0, 1.0, 1.0, 1.2);
    ASSERT_FALSE(sol.truncated);
    for (std::size_t k = 0; k < sol.t.size(); ++k) EXPECT_NEAR(sol.r[k], 1.0 - 0.5 * sol.t[k], 1e-10);
    EXPECT_NEAR(sol.radius(0.77), 1.0 - 0.5 * 0.77, 1e-10);
}

TEST(RadialHs, ZeroSlopeFreezesTheFront) {
    const RadialHsSolution sol = radial_hs_solve(0.0, 0.3, 1.0, 0.7, 1.0);
    for (double r : sol.r) EXPECT_EQ(r, 0.7);
}

TEST(RadialHs, SelfConvergesUnderStepHalving) {
    RadialHsOptions coarse;
    coarse.steps = 200;
    RadialHsOptions fine = coarse;
    fine.steps = 400;
    const double a = radial_hs_solve(1.0, 0.5, 1.0, 1.0, 0.2, coarse).radius(0.2);
    const double b = radial_hs_solve(1.0, 0.5, 1.0, 1.0, 0.2, fine).radius(0.2);
    EXPECT_NEAR(a, b, 1e-8);
}

TEST(RadialHs, TruncatesBeforeSaturation) {
    const RadialHsSolution sol = radial_hs_solve(0.1, 0.8, 1.0, 1.0, 1.0);
    EXPECT_TRUE(sol.truncated);
    EXPECT_LT(sol.horizon, std::log(1.0 / 0.8));
    EXPECT_FALSE(sol.notice.empty());
}

TEST(RadialHs, RejectsBadArguments) {
    EXPECT_THROW(radial_hs_solve(-1.0, 0.0, 1.0, 1.0, 1.0), InvalidInput);
    EXPECT_THROW(radial_hs_solve(1.0, 1.0, 1.0, 1.0, 1.0), InvalidInput);
    EXPECT_THROW(radial_hs_solve(1.0, 0.0, 0.0, 1.0, 1.0), InvalidInput);
    EXPECT_THROW(radial_hs_solve(1.0, 0.0, 1.0, 0.0, 1.0), InvalidInput);
}

TEST(RadialHs, MatchesTheFullSolverOnAGrowingDisk) {
    // Exterior cylinder with F = 1: the front slope at radius r is r / 2.
    RadialHsOptions opts;
    opts.exterior = true;
    opts.G_slope = 0.0;
    opts.eta_of_r = [](double r) { return r / 2.0; };
    const RadialHsSolution sol = radial_hs_solve(0.15, 0.0, 1.0, 0.3, 0.5, opts);

    const GridSpec g = GridSpec::box(2, 96, -1.0, 1.0);
    HeleShawSolver solver(g, constant_model(1.0), [](Vec2) { return 0.0; });
    const HsRun run = solver.run(solver.initial_state(ScalarField::sample(g, [](Vec2 x) { return norm(x) - 0.3; })), 0.5, {});
    const double r = mean_contour_radius(contour(run.frames.back().phi), {0.0, 0.0});
    EXPECT_NEAR(r / sol.radius(0.5), 1.0, 0.02);
}

TEST(InfConvolution, ConstantFieldIsUnchanged) {
    const GridSpec g = GridSpec::box(2, 32, -1.0, 1.0);
    const auto res = moving_inf_convolution({ScalarField(g, 0.7, 0.0), ScalarField(g, 0.7, 0.1)},
                                            rotation_model(1.0, 1.0), {0.0, 0.0}, 0.4, 1.0, 1.0);
    ASSERT_EQ(res.fields.size(), 2u);
    for (const auto& w : res.fields) {
        EXPECT_NEAR(w.min(), 0.7, 1e-15);
        EXPECT_NEAR(w.max(), 0.7, 1e-15);
    }
}

TEST(InfConvolution, StillDriftIsABallErosion) {
    const GridSpec g = GridSpec::box(2, 40, -1.0, 1.0);
    const ScalarField p = ScalarField::sample(g, [](Vec2 x) { return std::sin(3.0 * x.x) * std::cos(2.0 * x.y); });
    const double r = 0.3;
    const auto res = moving_inf_convolution({p}, constant_model(1.0), {0.0, 0.0}, r, 0.0, 1.0);
    const ScalarField& w = res.fields.front();
    const double h = g.h();
    const int reach = static_cast<int>(std::floor(r / 2.0 / h));
    for (int j = reach; j < g.ny() - reach; ++j) {
        for (int i = reach; i < g.nx() - reach; ++i) {
            double brute = std::numeric_limits<double>::infinity();
            for (int b = -reach; b <= reach; ++b) {
                for (int a = -reach; a <= reach; ++a) {
                    if (std::hypot(a, b) * h <= r / 2.0 + 1e-12) brute = std::min(brute, p.at(i + a, j + b));
                }
            }
            EXPECT_NEAR(w.at(i, j), brute, 1e-12);
        }
    }
}

TEST(InfConvolution, RadialFieldShiftsInward) {
    const GridSpec g = GridSpec::box(2, 80, -1.0, 1.0);
    const ScalarField p = ScalarField::sample(g, [](Vec2 x) { return norm(x); });
    const double r = 0.4, ball = r / 2.0;
    const auto res = moving_inf_convolution({p}, constant_model(1.0), {0.0, 0.0}, r, 0.0, 1.0);
    const ScalarField& w = res.fields.front();
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double d = norm(g.center(k));
        if (d > 0.8) continue;
        EXPECT_NEAR(w[k], std::max(d - ball, 0.0), 1.5 * g.h());
    }
    const auto sup = moving_inf_convolution({p}, constant_model(1.0), {0.0, 0.0}, r, 0.0, 1.0, true);
    EXPECT_NEAR(interpolate(sup.fields.front(), {0.3, 0.0}), 0.3 + ball, 1.5 * g.h());
}

TEST(InfConvolution, AlphaConstraintsAreEnforced) {
    const GridSpec g = GridSpec::box(2, 16, -1.0, 1.0);
    const std::vector<ScalarField> p{ScalarField(g, 0.0, 0.5)};
    // L R = 1 for a unit rotation on R = 1.
    EXPECT_THROW(moving_inf_convolution(p, rotation_model(1.0, 1.0), {0.0, 0.0}, 0.4, 0.5, 1.0), InvalidInput);
    // r / (2 tau) = 0.4.
    EXPECT_THROW(moving_inf_convolution(p, constant_model(1.0), {0.0, 0.0}, 0.4, 0.5, 1.0), InvalidInput);
    EXPECT_NO_THROW(moving_inf_convolution(p, constant_model(1.0), {0.0, 0.0}, 0.4, 0.3, 1.0));
}
