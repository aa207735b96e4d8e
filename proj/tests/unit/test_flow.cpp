#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stiffpme/flow.hpp"
#include "stiffpme/initial_data.hpp"

using namespace stiffpme;

namespace {

DriftModel preset(const std::string& name, PresetParams p = {}) { return make_drift(name, 2, p); }

Vec2 rotate(Vec2 x, double a) {
    return {x.x * std::cos(a) - x.y * std::sin(a), x.x * std::sin(a) + x.y * std::cos(a)};
}

}  // namespace

TEST(Presets, CarryConsistentDivergenceAndLipschitzConstants) {
    for (const auto& name : drift_preset_names()) {
        const DriftModel m = preset(name);
        EXPECT_LE(divergence_consistency_error(m, Box{{-1, -1}, {1, 1}}, 100, 7, 2), 1e-4) << name;
        EXPECT_GE(m.lipschitz_L, 0.0) << name;
    }
    EXPECT_DOUBLE_EQ(preset("rotation").div_b({0.3, 0.2}), 0.0);
    EXPECT_DOUBLE_EQ(preset("radial-sink").div_b({0.3, 0.2}), -2.0);
    EXPECT_DOUBLE_EQ(preset("potential").b({0.3, 0.2}).x, -0.3);
}

TEST(Presets, SourceIsFSetsTheCompressionRate) {
    PresetParams p;
    p.source = 0.7;
    p.source_is_F = true;
    const DriftModel m = preset("radial-sink", p);
    EXPECT_NEAR(m.F({0.1, -0.4}), 0.7, 1e-14);
    EXPECT_NEAR(m.inf_F, 0.7, 1e-14);
}

TEST(Presets, UnknownNameIsRejected) { EXPECT_THROW(preset("vortex"), InvalidInput); }

TEST(FlowMap, ConstantDrift) {
    PresetParams p;
    p.velocity = {1.0, 0.0};
    const Vec2 y = flow_map(preset("constant", p), 2.0, {0.0, 0.0}, 0.1);
    EXPECT_NEAR(y.x, 2.0, 1e-12);
    EXPECT_NEAR(y.y, 0.0, 1e-12);
}

TEST(FlowMap, LinearSinkMatchesTheExponential) {
    const Vec2 y = flow_map(preset("radial-sink"), 1.0, {1.0, 1.0}, 1e-3);
    EXPECT_NEAR(y.x, std::exp(-1.0), 1e-8);
    EXPECT_NEAR(y.y, std::exp(-1.0), 1e-8);
}

TEST(FlowMap, QuarterRotation) {
    const Vec2 y = flow_map(preset("rotation"), std::numbers::pi / 2, {1.0, 0.0}, 1e-2);
    EXPECT_NEAR(y.x, 0.0, 1e-6);
    EXPECT_NEAR(y.y, 1.0, 1e-6);
}

TEST(FlowMap, FourthOrderInTheStep) {
    const DriftModel m = preset("radial-sink");
    auto err = [&](double step) { return std::abs(flow_map(m, 1.0, {1.0, 0.0}, step).x - std::exp(-1.0)); };
    const double ratio = err(0.1) / err(0.05);
    EXPECT_GE(ratio, 12.0);
    EXPECT_LE(ratio, 20.0);
}

TEST(FlowMap, EscapeReportsTheLastInBoundsState) {
    PresetParams p;
    p.velocity = {1.0, 0.0};
    try {
        flow_map(preset("constant", p), 3.0, {0.0, 0.0}, 0.1, Box{{-1, -1}, {1, 1}});
        FAIL() << "expected an escape";
    } catch (const EscapeError& e) {
        EXPECT_LE(e.last_position().x, 1.0);
        EXPECT_GT(e.last_position().x, 0.8);
        EXPECT_GT(e.last_time(), 0.8);
    }
}

TEST(FlowMap, RejectsNonPositiveStep) {
    EXPECT_THROW(flow_map(preset("rotation"), 1.0, {0.0, 0.0}, 0.0), InvalidInput);
}

TEST(Semigroup, ZeroTimeAndEqualTimesAreExact) {
    const DriftModel m = preset("shear");
    EXPECT_EQ(semigroup_residual(m, {0.3, 0.4}, 0.0, 0.7, 1e-3), 0.0);
    EXPECT_LE(semigroup_residual(m, {0.3, 0.4}, 0.7, 0.7, 1e-3), 1e-12);
}

TEST(Semigroup, SinkFlowOnRandomTimes) {
    const DriftModel m = preset("radial-sink");
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        const Vec2 x{u(rng), u(rng)};
        EXPECT_LE(semigroup_residual(m, x, u(rng), u(rng), 1e-3), 1e-7);
    }
}

TEST(Semigroup, InverseFlowReturnsHome) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const char* name : {"rotation", "shear", "potential"}) {
        const DriftModel m = preset(name);
        for (int k = 0; k < 30; ++k) {
            const Vec2 x{u(rng), u(rng)};
            const double t = u(rng);
            EXPECT_LE(norm(flow_map(m, -t, flow_map(m, t, x, 1e-3), 1e-3) - x), 1e-6) << name;
        }
    }
}

TEST(TransportDensity, ConstantRateGrowsExponentially) {
    PresetParams p;
    p.source = 0.8;
    p.source_is_F = true;
    for (const char* name : {"constant", "rotation", "radial-sink"}) {
        const DriftModel m = preset(name, p);
        const double v = transport_density(m, [](Vec2) { return 0.3; }, {0.2, -0.1}, 1.2, 1e-3);
        EXPECT_NEAR(v, 0.3 * std::exp(0.8 * 1.2), 1e-8) << name;
    }
}

TEST(TransportDensity, ZeroTimeReturnsTheData) {
    const Bump b{{0.1, 0.0}, 0.4, 0.6};
    const DriftModel m = preset("rotation");
    const Vec2 x{0.2, 0.1};
    EXPECT_EQ(transport_density(m, [b](Vec2 y) { return b(y); }, x, 0.0, 1e-2), b(x));
}

TEST(TransportDensity, PureRotationCarriesTheData) {
    const Bump b{{0.4, 0.0}, 0.3, 0.7};
    const DriftModel m = preset("rotation");
    for (double t : {0.3, 1.0, 2.5}) {
        const Vec2 x = rotate({0.45, 0.05}, t);
        EXPECT_NEAR(transport_density(m, [b](Vec2 y) { return b(y); }, x, t, 1e-2), b({0.45, 0.05}), 1e-6);
    }
}

TEST(TransportDensity, DataAtOrAboveOneIsRejected) {
    EXPECT_THROW(transport_density(preset("rotation"), [](Vec2) { return 1.0; }, {0.0, 0.0}, 0.5, 1e-2), InvalidInput);
    EXPECT_THROW(transport_density(preset("rotation"), [](Vec2) { return -0.1; }, {0.0, 0.0}, 0.5, 1e-2), InvalidInput);
}

TEST(TransportDensity, NondecreasingAlongStreamlinesWhenFIsPositive) {
    PresetParams p;
    p.omega = 1.3;
    p.source = 0.5;
    const DriftModel m = preset("rotation", p);
    const Bump b{{0.3, 0.2}, 0.5, 0.4};
    const ScalarFn rho0 = [b](Vec2 y) { return b(y); };
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int s = 0; s < 50; ++s) {
        const Vec2 x0{u(rng), u(rng)};
        double prev = rho0(x0);
        for (int k = 1; k <= 10; ++k) {
            const double t = 0.1 * k;
            const double v = transport_density(m, rho0, flow_map(m, t, x0, 1e-2), t, 1e-2);
            EXPECT_GE(v, prev - 1e-10);
            prev = v;
        }
    }
}

TEST(TrajectorySpread, ConstantDriftIsAnIsometry) {
    PresetParams p;
    p.velocity = {0.3, -0.2};
    const SpreadCheck c = trajectory_spread_check(preset("constant", p), {0.0, 0.0}, {0.3, 0.4}, 1.5, 0.1);
    EXPECT_NEAR(c.actual, 0.5, 1e-12);
    EXPECT_TRUE(c.passes());
}

TEST(TrajectorySpread, SinkAttainsTheLowerBound) {
    const SpreadCheck c = trajectory_spread_check(preset("radial-sink"), {0.5, 0.0}, {0.0, 0.5}, 1.0, 1e-3);
    EXPECT_NEAR(c.actual, c.lower, 1e-7);
    EXPECT_NEAR(c.actual, std::exp(-1.0) * std::sqrt(0.5), 1e-7);
    EXPECT_TRUE(c.passes());
}

TEST(TrajectorySpread, ZeroTimeCollapsesTheEnvelope) {
    const SpreadCheck c = trajectory_spread_check(preset("shear"), {0.1, 0.2}, {0.4, -0.2}, 0.0, 0.1);
    EXPECT_EQ(c.lower, c.actual);
    EXPECT_EQ(c.upper, c.actual);
}

TEST(TrajectorySpread, RandomPairsStayInsideTheEnvelope) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const auto& name : drift_preset_names()) {
        const DriftModel m = preset(name);
        for (int k = 0; k < 40; ++k) {
            EXPECT_TRUE(trajectory_spread_check(m, {u(rng), u(rng)}, {u(rng), u(rng)}, u(rng), 1e-2).passes()) << name;
        }
    }
}

TEST(Streamline, SampleSpacingRespectsTheStep) {
    const Streamline s = trace_streamline(preset("rotation"), {0.5, 0.0}, 1.0, 0.05);
    ASSERT_GE(s.samples.size(), 2u);
    EXPECT_EQ(s.samples.front().first, 0.0);
    EXPECT_NEAR(s.samples.back().first, 1.0, 1e-12);
    for (std::size_t k = 1; k < s.samples.size(); ++k) {
        EXPECT_LE(s.samples[k].first - s.samples[k - 1].first, 0.05 + 1e-12);
    }
}

TEST(MinF, SampledOnCellCentres) {
    PresetParams p;
    p.source = 0.25;
    const GridSpec g = GridSpec::box(2, 8, -1.0, 1.0);
    EXPECT_NEAR(min_F_on_grid(preset("radial-sink", p), g), 2.25, 1e-12);
}

TEST(DefaultStep, IsTheSmallerOfHAndTenthOfInverseL) {
    PresetParams p;
    p.omega = 20.0;
    EXPECT_DOUBLE_EQ(default_flow_step(preset("rotation", p), 0.1), 1.0 / 200.0);
    EXPECT_DOUBLE_EQ(default_flow_step(preset("constant"), 0.1), 0.1);
}
