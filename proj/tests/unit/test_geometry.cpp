#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "stiffpme/geometry.hpp"
#include "stiffpme/level_set.hpp"

using namespace stiffpme;

namespace {

Mask disk_mask(const GridSpec& g, Vec2 c, double r) {
    return Mask::sample(g, [=](Vec2 x) { return norm(x - c) <= r; });
}

DriftModel constant_source(double f) {
    PresetParams p;
    p.source = f;
    return make_drift("constant", 2, p);
}

std::vector<ScalarField> static_series(const ScalarField& u, double dt, int count) {
    std::vector<ScalarField> out;
    for (int k = 0; k < count; ++k) {
        ScalarField f = u;
        f.set_time(k * dt);
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace

TEST(Perimeter, EmptyMaskIsZero) {
    const GridSpec g = GridSpec::box(2, 32, -1.0, 1.0);
    EXPECT_EQ(perimeter(Mask(g)), 0.0);
    EXPECT_EQ(face_count_perimeter(Mask(g)), 0.0);
}

TEST(Perimeter, AlignedSquare) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    const Mask sq = Mask::sample(g, [](Vec2 x) { return std::abs(x.x) < 0.5 && std::abs(x.y) < 0.5; });
    EXPECT_NEAR(face_count_perimeter(sq), 4.0, 1e-12);
    EXPECT_NEAR(perimeter(sq), 4.0, 2.0 * g.h());
}

TEST(Perimeter, DiskFromMaskAndFromLevelSet) {
    const GridSpec g = GridSpec::box(2, 256, -0.5, 0.5);
    const double exact = 2.0 * std::numbers::pi * 0.3;
    EXPECT_NEAR(perimeter(disk_mask(g, {0.0, 0.0}, 0.3)) / exact, 1.0, 0.05);
    const ScalarField phi = ScalarField::sample(g, [](Vec2 x) { return norm(x) - 0.3; });
    EXPECT_NEAR(perimeter(phi) / exact, 1.0, 0.01);
}

TEST(Perimeter, RegionRestrictsTheCount) {
    const GridSpec g = GridSpec::box(2, 128, -1.0, 1.0);
    const ScalarField phi = ScalarField::sample(g, [](Vec2 x) { return norm(x) - 0.5; });
    const Mask right = Mask::sample(g, [](Vec2 x) { return x.x > 0.0; });
    EXPECT_NEAR(perimeter(phi, &right) / perimeter(phi), 0.5, 0.02);
}

TEST(Perimeter, RefinementKeepsTheBiasSmall) {
    // The staircase error of the smoothed mask perimeter does not grow under refinement.
    const double exact = 2.0 * std::numbers::pi * 0.3;
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {64, 128, 256}) {
        const GridSpec g = GridSpec::box(2, n, -1.0, 1.0);
        const double err = std::abs(perimeter(disk_mask(g, {0.0, 0.0}, 0.3)) / exact - 1.0);
        EXPECT_LE(err, 0.05) << n;
        EXPECT_LE(err, prev + 0.05) << n;
        prev = err;
    }
}

TEST(Contour, DiskIsOneClosedPolylineAtTheRightRadius) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    const auto lines = contour(ScalarField::sample(g, [](Vec2 x) { return norm(x - Vec2{0.1, 0.0}) - 0.4; }));
    ASSERT_EQ(lines.size(), 1u);
    EXPECT_TRUE(lines.front().closed);
    EXPECT_NEAR(mean_contour_radius(lines, {0.1, 0.0}), 0.4, 0.01);
    EXPECT_NEAR(contour_length(lines), 2.0 * std::numbers::pi * 0.4, 0.02);
}

TEST(Hausdorff, IdenticalMasksGiveZero) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    const Mask a = disk_mask(g, {0.1, 0.2}, 0.3);
    EXPECT_EQ(hausdorff_distance(a, a), 0.0);
}

TEST(Hausdorff, ConcentricDisks) {
    const GridSpec g = GridSpec::box(2, 128, -1.0, 1.0);
    EXPECT_NEAR(hausdorff_distance(disk_mask(g, {0.0, 0.0}, 0.2), disk_mask(g, {0.0, 0.0}, 0.3)), 0.1, g.h());
}

TEST(Hausdorff, DisjointTranslates) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    const double d = 0.6;
    EXPECT_GE(hausdorff_distance(disk_mask(g, {-0.3, 0.0}, 0.2), disk_mask(g, {-0.3 + d, 0.0}, 0.2)), d - 2.0 * g.h());
}

TEST(Hausdorff, EmptyMaskIsRejected) {
    const GridSpec g = GridSpec::box(2, 16, -1.0, 1.0);
    EXPECT_THROW(hausdorff_distance(Mask(g), disk_mask(g, {0.0, 0.0}, 0.3)), InvalidInput);
}

TEST(Hausdorff, TriangleInequalityOnRandomDisks) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> c(-0.4, 0.4), r(0.1, 0.4);
    for (int trial = 0; trial < 20; ++trial) {
        const Mask a = disk_mask(g, {c(rng), c(rng)}, r(rng));
        const Mask b = disk_mask(g, {c(rng), c(rng)}, r(rng));
        const Mask d = disk_mask(g, {c(rng), c(rng)}, r(rng));
        EXPECT_LE(hausdorff_distance(a, d), hausdorff_distance(a, b) + hausdorff_distance(b, d) + 2.0 * g.h());
    }
}

TEST(FlattenedSet, TauIsTheFixedPoint) {
    const FlattenedSetSpec spec{0.2, 0.5};
    const double tau = spec.tau();
    EXPECT_NEAR(spec.r_of_t(tau), tau, 1e-12);
    EXPECT_NEAR(spec.r_of_t(0.0), 0.2, 1e-15);
    EXPECT_NEAR((FlattenedSetSpec{0.1, 0.0}.tau()), 0.1, 1e-12);
}

TEST(SupInfConvolve, ConstantSeriesIsUnchanged) {
    const GridSpec g = GridSpec::box(2, 32, -1.0, 1.0);
    const auto series = static_series(ScalarField(g, 0.4), 0.02, 16);
    for (ConvolutionMode mode : {ConvolutionMode::kSup, ConvolutionMode::kInf}) {
        const auto out = sup_inf_convolve(series, {0.1, 0.0}, mode);
        ASSERT_FALSE(out.empty());
        for (const auto& f : out) {
            EXPECT_EQ(f.min(), 0.4);
            EXPECT_EQ(f.max(), 0.4);
        }
    }
}

TEST(SupInfConvolve, HalfPlaneIsDilatedByTwiceTheRadius) {
    const GridSpec g = GridSpec::box(2, 80, -1.0, 1.0);
    const double r = 0.1;
    const ScalarField half = ScalarField::sample(g, [](Vec2 x) { return x.x < 0.0 ? 1.0 : 0.0; });
    const auto out = sup_inf_convolve(static_series(half, 0.02, 16), {r, 0.0}, ConvolutionMode::kSup);
    ASSERT_FALSE(out.empty());
    for (const auto& f : out) {
        for (std::size_t k = 0; k < g.size(); ++k) {
            const double x = g.center(k).x;
            if (x < 2.0 * r - g.h()) {
                EXPECT_EQ(f[k], 1.0) << x;
            } else if (x > 2.0 * r + g.h()) {
                EXPECT_EQ(f[k], 0.0) << x;
            }
        }
    }
}

TEST(SupInfConvolve, SupIsMonotoneInTheInput) {
    const GridSpec g = GridSpec::box(2, 32, -1.0, 1.0);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<ScalarField> lo, hi;
    for (int k = 0; k < 12; ++k) {
        ScalarField a(g, 0.0, 0.02 * k), b(g, 0.0, 0.02 * k);
        for (std::size_t c = 0; c < a.size(); ++c) {
            a[c] = u(rng);
            b[c] = a[c] + u(rng);
        }
        lo.push_back(a);
        hi.push_back(b);
    }
    const auto wa = sup_inf_convolve(lo, {0.1, 0.0}, ConvolutionMode::kSup);
    const auto wb = sup_inf_convolve(hi, {0.1, 0.0}, ConvolutionMode::kSup);
    ASSERT_EQ(wa.size(), wb.size());
    for (std::size_t s = 0; s < wa.size(); ++s) {
        for (std::size_t c = 0; c < wa[s].size(); ++c) EXPECT_LE(wa[s][c], wb[s][c]);
    }
}

TEST(SupInfConvolve, RejectsCoarseSeriesAndShortWindows) {
    const GridSpec g = GridSpec::box(2, 16, -1.0, 1.0);
    EXPECT_THROW(sup_inf_convolve(static_series(ScalarField(g), 0.05, 10), {0.1, 0.0}, ConvolutionMode::kSup),
                 InvalidInput);
    EXPECT_THROW(sup_inf_convolve(static_series(ScalarField(g), 0.02, 5), {0.1, 0.0}, ConvolutionMode::kSup),
                 InvalidInput);
}

TEST(BallExtremum, OpeningDoesNotExceedTheField) {
    const GridSpec g = GridSpec::box(2, 48, -1.0, 1.0);
    const ScalarField u = ScalarField::sample(g, [](Vec2 x) { return std::sin(4.0 * x.x) + x.y * x.y; });
    const ScalarField opened =
        ball_extremum(ball_extremum(u, 0.15, ConvolutionMode::kInf), 0.15, ConvolutionMode::kSup);
    for (std::size_t k = 0; k < g.size(); ++k) EXPECT_LE(opened[k], u[k] + 1e-15);
}

TEST(PerimeterBound, GrowingPatchRespectsThePatchBound) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    const DriftModel model = constant_source(1.0);
    HeleShawSolver solver(g, model, [](Vec2) { return 0.0; });
    const HsRun run =
        solver.run(solver.initial_state(ScalarField::sample(g, [](Vec2 x) { return norm(x) - 0.3; })), 0.5, {0.25});
    const PerimeterCheck chk = perimeter_bound_check(run.frames, model, Mask(g, true), 1.0);
    EXPECT_EQ(chk.status, CheckStatus::kPass) << chk.note;
    EXPECT_LE(chk.measured, chk.patch_bound);
    EXPECT_NEAR(chk.measured, 2.0 * std::numbers::pi * 0.3 * std::exp(0.25), 0.05);
}

TEST(PerimeterBound, InitialFrameMeasuresThePatch) {
    const GridSpec g = GridSpec::box(2, 64, -1.0, 1.0);
    const DriftModel model = constant_source(1e-3);
    HeleShawSolver solver(g, model, [](Vec2) { return 0.0; });
    const HsState s0 = solver.initial_state(ScalarField::sample(g, [](Vec2 x) { return norm(x) - 0.3; }));
    const PerimeterCheck at_zero = perimeter_bound_check({s0}, model, Mask(g, true), 1.0);
    EXPECT_EQ(at_zero.status, CheckStatus::kPass);
    EXPECT_NEAR(at_zero.measured, 2.0 * std::numbers::pi * 0.3, 0.02);

    const HsRun run = solver.run(s0, 0.3, {});
    const PerimeterCheck still = perimeter_bound_check(run.frames, model, Mask(g, true), 1.0);
    EXPECT_EQ(still.status, CheckStatus::kPass);
    EXPECT_NEAR(still.measured, at_zero.measured, 0.02);
}

TEST(PerimeterBound, SaturatedExteriorIsInconclusive) {
    const GridSpec g = GridSpec::box(2, 32, -1.0, 1.0);
    const ScalarField phi = ScalarField::sample(g, [](Vec2 x) { return norm(x) - 0.3; });
    const Mask omega = sublevel_mask(phi);
    ScalarField rhoE(g);
    for (std::size_t k = 0; k < g.size(); ++k) rhoE[k] = omega[k] ? 0.0 : 0.95;
    const HsState s{phi, omega, ScalarField(g), rhoE, 0.0, 0};
    const PerimeterCheck chk = perimeter_bound_check({s}, constant_source(1.0), Mask(g, true), 0.1);
    EXPECT_EQ(chk.status, CheckStatus::kInconclusive);
}

TEST(PerimeterConstant, ScalesWithTheBoundaryOfAPatch) {
    const GridSpec g = GridSpec::box(2, 128, -1.0, 1.0);
    const auto indicator = [&](double r) {
        return ScalarField::sample(g, [r](Vec2 x) { return norm(x) <= r ? 1.0 : 0.0; });
    };
    const double small = estimate_perimeter_constant(indicator(0.2));
    const double large = estimate_perimeter_constant(indicator(0.4));
    EXPECT_GT(small, 0.0);
    EXPECT_GT(large, small);
    EXPECT_EQ(estimate_perimeter_constant(ScalarField(g)), 0.0);
}
