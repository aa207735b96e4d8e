#include "stiffpme_cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "stiffpme/barriers.hpp"
#include "stiffpme/convergence.hpp"
#include "stiffpme/field_io.hpp"
#include "stiffpme/flow.hpp"
#include "stiffpme/geometry.hpp"
#include "stiffpme/hele_shaw.hpp"
#include "stiffpme/pme.hpp"
#include "stiffpme_cli/output.hpp"

namespace stiffpme::cli {

namespace {

class Recorder {
public:
    Recorder(std::string suite, std::vector<VerifyResult>& out) : suite_(std::move(suite)), out_(out) {}

    /// Runs `body`, which returns {worst, detail}; exceptions fail the test with their message.
    template <class Body>
    void check(const std::string& test, double tolerance, Body&& body) {
        VerifyResult r{suite_, test, false, 0.0, tolerance, ""};
        try {
            auto [worst, detail] = body();
            r.worst = worst;
            r.detail = detail;
            r.passed = std::isfinite(worst) && worst <= tolerance;
        } catch (const std::exception& e) {
            r.worst = std::numeric_limits<double>::infinity();
            r.detail = std::string("exception: ") + e.what();
        }
        out_.push_back(std::move(r));
    }

private:
    std::string suite_;
    std::vector<VerifyResult>& out_;
};

using Outcome = std::pair<double, std::string>;

DriftModel constant_source(double f) {
    PresetParams p;
    p.source = f;
    return make_drift("constant", 2, p);
}

DriftModel rotation(double omega, double f) {
    PresetParams p;
    p.omega = omega;
    p.source = f;
    return make_drift("rotation", 2, p);
}

void grid_suite(const VerifyOptions& o, std::vector<VerifyResult>& out) {
    Recorder rec("core_grid", out);
    const LaplacianFn lap = o.laplacian ? o.laplacian : LaplacianFn([](const ScalarField& u) { return laplacian(u); });

    rec.check("l1_distance_constant_fields", 1e-12, [] {
        const GridSpec g = GridSpec::plane(10, 10, 0.1, {0.0, 0.0});
        const double d = l1_distance(ScalarField(g, 1.0), ScalarField(g, 0.0));
        return Outcome{std::abs(d - 1.0), "area of the unit square"};
    });
    rec.check("laplacian_quadratic_interior", 1e-10, [&] {
        const GridSpec g = GridSpec::box(2, 32, -1.0, 1.0);
        const ScalarField u = ScalarField::sample(g, [](Vec2 x) { return x.x * x.x + x.y * x.y; });
        const ScalarField l = lap(u);
        double worst = 0.0;
        for (int j = 1; j + 1 < g.ny(); ++j) {
            for (int i = 1; i + 1 < g.nx(); ++i) worst = std::max(worst, std::abs(l.at(i, j) - 4.0));
        }
        return Outcome{worst, "lap |x|^2 = 4"};
    });
    rec.check("laplacian_affine_interior", 1e-10, [&] {
        const GridSpec g = GridSpec::box(2, 32, -1.0, 1.0);
        const ScalarField u = ScalarField::sample(g, [](Vec2 x) { return 2.0 * x.x - 3.0 * x.y + 0.5; });
        const ScalarField l = lap(u);
        double worst = 0.0;
        for (int j = 1; j + 1 < g.ny(); ++j) {
            for (int i = 1; i + 1 < g.nx(); ++i) worst = std::max(worst, std::abs(l.at(i, j)));
        }
        return Outcome{worst, "lap of affine data"};
    });
    rec.check("laplacian_second_order_1d", 0.25, [&] {
        // Error ratio under halving h must approach 1/4; the deficit from second order is reported.
        auto err = [&](int n) {
            const GridSpec g = GridSpec::line(n, 2.0 / n, -1.0);
            const ScalarField u = ScalarField::sample(g, [](Vec2 x) { return std::sin(std::numbers::pi * x.x); });
            const ScalarField l = lap(u);
            double worst = 0.0;
            for (int i = n / 4; i < 3 * n / 4; ++i) {
                const double x = g.center(i).x;
                const double exact = -std::numbers::pi * std::numbers::pi * std::sin(std::numbers::pi * x);
                worst = std::max(worst, std::abs(l.at(i) - exact));
            }
            return worst;
        };
        const double e1 = err(128);
        const double e2 = err(256);
        const double order = std::log2(e1 / e2);
        return Outcome{std::abs(order - 2.0), "observed order " + fmt(order)};
    });
    rec.check("spf1_round_trip", 0.0, [] {
        const GridSpec g = GridSpec::plane(7, 5, 0.3, {-1.0, 2.0});
        const ScalarField u = ScalarField::sample(g, [](Vec2 x) { return std::exp(x.x) - x.y / 3.0; }, 0.125);
        std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
        write_spf1(buf, u);
        const ScalarField v = read_spf1(buf);
        double worst = (v.grid() == g && v.time() == u.time()) ? 0.0 : 1.0;
        for (std::size_t k = 0; k < u.size(); ++k) worst = std::max(worst, std::abs(u[k] - v[k]));
        return Outcome{worst, "bitwise"};
    });
}

void flow_suite(const VerifyOptions& o, std::vector<VerifyResult>& out) {
    Recorder rec("flow", out);
    const int samples = o.tier == Tier::kSmoke ? 20 : 200;
    std::mt19937_64 rng(o.seed);
    std::uniform_real_distribution<double> unit(-0.8, 0.8);

    rec.check("semigroup_rotation", 1e-6, [&] {
        const DriftModel model = rotation(1.0, 0.0);
        double worst = 0.0;
        for (int k = 0; k < samples; ++k) {
            const Vec2 x{unit(rng), unit(rng)};
            worst = std::max(worst, semigroup_residual(model, x, 0.7, 1.3, 0.01));
        }
        return Outcome{worst, std::to_string(samples) + " points"};
    });
    rec.check("rotation_transport_exact", 1e-6, [&] {
        const DriftModel model = rotation(2.0, 0.0);
        double worst = 0.0;
        for (int k = 0; k < samples; ++k) {
            const Vec2 x{unit(rng), unit(rng)};
            const double t = 0.9;
            const Vec2 y = flow_map(model, t, x, 0.01);
            const Vec2 exact{x.x * std::cos(2.0 * t) - x.y * std::sin(2.0 * t),
                             x.x * std::sin(2.0 * t) + x.y * std::cos(2.0 * t)};
            worst = std::max(worst, norm(y - exact));
        }
        return Outcome{worst, "closed-form rotation"};
    });
    rec.check("trajectory_spread_envelope", 0.0, [&] {
        int failures = 0;
        for (const char* preset : {"rotation", "radial-sink", "shear", "potential"}) {
            const DriftModel model = make_drift(preset, 2, PresetParams{});
            for (int k = 0; k < samples; ++k) {
                const Vec2 x{unit(rng), unit(rng)};
                const Vec2 y{unit(rng), unit(rng)};
                if (!trajectory_spread_check(model, x, y, 0.8, 0.01).passes()) ++failures;
            }
        }
        return Outcome{static_cast<double>(failures), "pairs outside the e^{+-L t} envelope"};
    });
    rec.check("radial_sink_transport_density", 1e-6, [&] {
        PresetParams p;
        p.rate = 0.5;
        p.source = 1.0;
        p.source_is_F = true;
        const DriftModel model = make_drift("radial-sink", 2, p);
        const Bump bump{{0.0, 0.0}, 1.0, 0.5};
        const ScalarFn rho0 = [bump](Vec2 x) { return bump(x); };
        double worst = 0.0;
        const double t = 0.6;
        for (int k = 0; k < samples; ++k) {
            const Vec2 x{unit(rng) * 0.5, unit(rng) * 0.5};
            const double exact = bump(std::exp(0.5 * t) * x) * std::exp(t);
            worst = std::max(worst, std::abs(transport_density(model, rho0, x, t, 0.01) - exact));
        }
        return Outcome{worst, "foot x e^{kt}, growth e^{Ft}"};
    });
    rec.check("divergence_consistency", 1e-6, [&] {
        double worst = 0.0;
        for (const auto& name : drift_preset_names()) {
            const DriftModel model = make_drift(name, 2, PresetParams{});
            worst = std::max(worst, divergence_consistency_error(model, Box{{-1, -1}, {1, 1}}, samples, o.seed, 2));
        }
        return Outcome{worst, "all presets"};
    });
}

void pme_suite(const VerifyOptions& o, std::vector<VerifyResult>& out) {
    Recorder rec("pme", out);
    const int n = o.tier == Tier::kSmoke ? 48 : 96;
    const GridSpec g = GridSpec::box(2, n, -1.0, 1.0);

    rec.check("barenblatt_1d_l1", 0.02, [&] {
        // m = 2 source solution t^{-1/3} (C - x^2 t^{-2/3} / 12)_+ from t = 1 to t = 2.
        const double m = 2.0, C = 0.8;
        auto baren = [&](double x, double t) {
            return std::pow(t, -1.0 / 3.0) * std::max(0.0, C - x * x * std::pow(t, -2.0 / 3.0) / 12.0);
        };
        const GridSpec line = GridSpec::line(o.tier == Tier::kSmoke ? 240 : 480, 12.0 / (o.tier == Tier::kSmoke ? 240 : 480), -6.0);
        InitialData init{Mask(line), ScalarField::sample(line, [&](Vec2 x) { return baren(x.x, 1.0); })};
        const DriftModel model = make_drift("constant", 1, PresetParams{});
        const PmeRun run = simulate(init, model, m, 1.0, {});
        const ScalarField exact = ScalarField::sample(line, [&](Vec2 x) { return baren(x.x, 2.0); });
        const double rel = l1_distance(run.states.back().rho, exact) / integrate(exact);
        return Outcome{rel, "relative L1 at t = 2"};
    });
    rec.check("mass_conservation_no_source", 1e-12, [&] {
        RegularData d;
        d.disks.push_back({{-0.2, 0.0}, 0.25});
        d.bumps.push_back({{0.35, 0.2}, 0.2, 0.6});
        const DriftModel model = rotation(1.0, 0.0);
        const PmeRun run = simulate(d.sample(g), model, 10.0, 0.1, {});
        const double m0 = integrate(run.states.front().rho);
        return Outcome{std::abs(integrate(run.states.back().rho) - m0) / m0, "relative drift"};
    });
    rec.check("comparison_nested_data", 1e-10, [&] {
        RegularData lo, hi;
        lo.disks.push_back({{0.0, 0.0}, 0.2});
        lo.bumps.push_back({{0.4, 0.0}, 0.1, 0.4});
        hi.disks.push_back({{0.0, 0.0}, 0.3});
        hi.bumps.push_back({{0.4, 0.0}, 0.15, 0.6});
        const DriftModel ma = rotation(1.0, 0.5);
        const DriftModel mb = rotation(1.0, 1.0);
        const auto runs = simulate_lockstep({{lo.sample(g), ma}, {hi.sample(g), mb}}, 10.0, 0.15, {0.05, 0.1});
        return Outcome{comparison_check(runs[0], runs[1], ma, mb), "max (rhoA - rhoB)_+"};
    });
    rec.check("l1_contraction_exact", 1e-9, [&] {
        RegularData a, b;
        a.bumps.push_back({{-0.1, 0.0}, 0.3, 0.8});
        b.bumps.push_back({{0.1, 0.05}, 0.3, 0.7});
        const DriftModel model = rotation(1.0, 1.0);
        const auto runs = simulate_lockstep({{a.sample(g), model}, {b.sample(g), model}}, 10.0, 0.25, {});
        const auto st = contraction_statistic(runs[0], runs[1], model, 0.25);
        return Outcome{std::max(0.0, st.lhs / st.rhs - 1.0), "relative excess over e^{t sup f} d0"};
    });
    rec.check("density_stays_below_growth_bound", 1e-12, [&] {
        RegularData d;
        d.disks.push_back({{0.0, 0.0}, 0.3});
        const DriftModel model = constant_source(1.0);
        const PmeRun run = simulate(d.sample(g), model, 20.0, 0.1, {});
        double worst = 0.0;
        for (const auto& s : run.states) worst = std::max(worst, s.rho.max() - std::exp(s.time));
        return Outcome{std::max(0.0, worst), "max rho - e^{t sup f}"};
    });
}

void hele_shaw_suite(const VerifyOptions& o, std::vector<VerifyResult>& out) {
    Recorder rec("hele_shaw", out);
    const int n = o.tier == Tier::kSmoke ? 64 : 128;
    const GridSpec g = GridSpec::box(2, n, -1.0, 1.0);

    rec.check("radial_pressure_centre", 0.02, [&] {
        const ScalarField phi = ScalarField::sample(g, [](Vec2 x) { return norm(x) - 0.3; });
        const ScalarField p = solve_pressure(phi, constant_source(1.0));
        const double centre = interpolate(p, {0.0, 0.0});
        return Outcome{std::abs(centre / 0.0225 - 1.0), "p(0) against R^2 / 4"};
    });
    rec.check("disk_growth_radius", 0.02, [&] {
        const double t = o.tier == Tier::kSmoke ? 0.5 : 1.0;
        HeleShawSolver solver(g, constant_source(1.0), [](Vec2) { return 0.0; });
        const HsState s0 = solver.initial_state(ScalarField::sample(g, [](Vec2 x) { return norm(x) - 0.3; }));
        const HsRun run = solver.run(s0, t, {});
        const double r = mean_contour_radius(contour(run.frames.back().phi), {0.0, 0.0});
        const double exact = 0.3 * std::exp(t / 2.0);
        return Outcome{std::abs(r / exact - 1.0), "radius " + fmt(r) + " vs " + fmt(exact)};
    });
    rec.check("nucleation_time", 0.2, [&] {
        HsOptions opts;
        opts.dt_max = 0.002;
        const Bump bump{{0.4, 0.0}, 0.25, 0.9};
        HeleShawSolver solver(g, constant_source(1.0), [bump](Vec2 x) { return bump(x); }, opts);
        const HsState s0 =
            solver.initial_state(ScalarField::sample(g, [](Vec2 x) { return norm(x - Vec2{-0.4, 0.0}) - 0.2; }));
        const HsRun run = solver.run(s0, 0.15, {});
        double first = -1.0;
        for (const auto& e : run.events) {
            if (e.new_component) {
                first = e.time;
                break;
            }
        }
        if (first < 0.0) return Outcome{std::numeric_limits<double>::infinity(), "no new component"};
        const double exact = std::log(10.0 / 9.0);
        return Outcome{std::abs(first / exact - 1.0), "t* = " + fmt(first)};
    });
    rec.check("streamline_monotonicity", 0.02, [&] {
        const DriftModel model = rotation(1.0, 1.0);
        HsOptions opts;
        HeleShawSolver solver(g, model, [](Vec2) { return 0.0; }, opts);
        const HsState s0 =
            solver.initial_state(ScalarField::sample(g, [](Vec2 x) { return norm(x - Vec2{0.2, 0.0}) - 0.2; }));
        std::vector<double> outs;
        for (int k = 1; k < 10; ++k) outs.push_back(0.05 * k);
        const HsRun run = solver.run(s0, 0.5, outs);
        const MonotonicityReport rep = streamline_monotonicity_check(run.frames, model, 50, o.seed);
        return Outcome{rep.fraction(), std::to_string(rep.violations) + "/" + std::to_string(rep.streamlines)};
    });
}

void barrier_suite(const VerifyOptions& o, std::vector<VerifyResult>& out) {
    Recorder rec("barriers", out);
    const GridSpec g = GridSpec::box(2, o.tier == Tier::kSmoke ? 48 : 96, -1.0, 1.0);

    rec.check("radial_closed_form", 1e-8, [] {
        // Interior cylinder, constant G: r(t) = 1 - (t - ln((1 - a e^t) / (1 - a))).
        RadialHsOptions opts;
        opts.G_slope = 0.0;
        const double a = 0.5;
        const RadialHsSolution sol = radial_hs_solve(1.0, a, 1.0, 1.0, 0.4, opts);
        double worst = 0.0;
        for (std::size_t k = 0; k < sol.t.size(); ++k) {
            const double t = sol.t[k];
            const double exact = 1.0 - (t - std::log((1.0 - a * std::exp(t)) / (1.0 - a)));
            worst = std::max(worst, std::abs(sol.r[k] - exact));
        }
        return Outcome{worst, "max front error"};
    });
    rec.check("density_subbarrier_residual", 1e-6, [&] {
        DensityBarrier bar;
        bar.model = rotation(1.0, 1.0);
        bar.mu = [](double t) { return 0.5 * std::exp(0.5 * t); };
        bar.mu_prime = [](double t) { return 0.25 * std::exp(0.5 * t); };
        bar.r = 0.3;
        bar.L = 1.0;
        bar.x0 = {0.3, 0.0};
        const std::vector<double> times{0.0, 0.1, 0.2, 0.3};
        const double m0 = barrier_m0_prescan(bar, g, times, 0.05);
        if (m0 <= 0.0) return Outcome{std::numeric_limits<double>::infinity(), "no m0 found"};
        double worst = -std::numeric_limits<double>::infinity();
        for (double m : {m0, 2.0 * m0}) {
            for (double t : times) worst = std::max(worst, barrier_residual(bar, g, m, t, 0.05).worst);
        }
        return Outcome{worst, "m0 = " + fmt(m0)};
    });
    rec.check("pressure_subbarrier", 1e-9, [&] {
        PressureBarrier bar;
        bar.model = rotation(1.0, 1.0);
        bar.mu = [](double t) { return 0.005 * std::exp(t); };
        bar.mu_prime = [](double t) { return 0.005 * std::exp(t); };
        bar.r = 0.5;
        bar.L = 1.0;
        bar.x0 = {0.2, 0.0};
        bar.kappa = 0.5;
        const double m = 10.0;
        const auto violated = pressure_barrier_hypotheses(bar, m, 0.5, 2);
        if (!violated.empty()) return Outcome{std::numeric_limits<double>::infinity(), violated.front()};
        double worst = -std::numeric_limits<double>::infinity();
        for (double t : {0.0, 0.25, 0.5}) worst = std::max(worst, pressure_barrier_residual(bar, g, m, t).worst);
        return Outcome{worst, "hypotheses hold"};
    });
}

void geometry_suite(const VerifyOptions& o, std::vector<VerifyResult>& out) {
    Recorder rec("geometry", out);
    const GridSpec g = GridSpec::box(2, o.tier == Tier::kSmoke ? 128 : 256, -1.0, 1.0);
    const double two_pi_r = 2.0 * std::numbers::pi * 0.3;

    rec.check("disk_perimeter_level_set", 0.01, [&] {
        const ScalarField phi = ScalarField::sample(g, [](Vec2 x) { return norm(x) - 0.3; });
        return Outcome{std::abs(perimeter(phi) / two_pi_r - 1.0), "relative"};
    });
    rec.check("disk_perimeter_mask", 0.05, [&] {
        const Mask m = Mask::sample(g, [](Vec2 x) { return norm(x) <= 0.3; });
        return Outcome{std::abs(perimeter(m) / two_pi_r - 1.0), "relative"};
    });
    rec.check("square_perimeter_mask", 2.0 * g.h(), [&] {
        const Mask m = Mask::sample(g, [](Vec2 x) { return std::abs(x.x) <= 0.4 && std::abs(x.y) <= 0.4; });
        // Face counting is exact for an axis-aligned cell rectangle.
        return Outcome{std::abs(perimeter(m) - face_count_perimeter(m)), "against the cell-union perimeter"};
    });
    rec.check("hausdorff_concentric_disks", 2.0 * g.h(), [&] {
        const Mask a = Mask::sample(g, [](Vec2 x) { return norm(x) <= 0.3; });
        const Mask b = Mask::sample(g, [](Vec2 x) { return norm(x) <= 0.45; });
        return Outcome{std::abs(hausdorff_distance(a, b) - 0.15), "absolute"};
    });
    rec.check("perimeter_bound_growing_disk", 0.0, [&] {
        const GridSpec gg = GridSpec::box(2, 64, -1.0, 1.0);
        const DriftModel model = constant_source(1.0);
        HeleShawSolver solver(gg, model, [](Vec2) { return 0.0; });
        const HsState s0 = solver.initial_state(ScalarField::sample(gg, [](Vec2 x) { return norm(x) - 0.3; }));
        const HsRun run = solver.run(s0, 0.5, {0.25});
        const PerimeterCheck chk = perimeter_bound_check(run.frames, model, Mask(gg, true), 0.5);
        const double excess = chk.status == CheckStatus::kPass ? 0.0 : std::max(1.0, chk.measured - chk.patch_bound);
        return Outcome{excess, "Per " + fmt(chk.measured) + " bound " + fmt(chk.patch_bound)};
    });
}

void convergence_suite(const VerifyOptions& o, std::vector<VerifyResult>& out) {
    Recorder rec("convergence", out);
    const bool smoke = o.tier == Tier::kSmoke;

    rec.check("family_l1_decreasing", 0.0, [&] {
        FamilyConfig fc;
        fc.grid = GridSpec::box(2, smoke ? 48 : 128, -1.0, 1.0);
        fc.data.disks.push_back({{0.0, 0.0}, 0.3});
        fc.model = constant_source(1.0);
        fc.m_list = smoke ? std::vector<double>{5.0, 10.0, 20.0} : std::vector<double>{5.0, 10.0, 20.0, 40.0, 80.0};
        fc.t_end = smoke ? 0.25 : 1.0;
        const FamilyRun fam = run_family(fc);
        const auto rows = l1_limit_error(fam, fc.t_end);
        int breaks = 0;
        std::string detail;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (k > 0 && !(rows[k].value < rows[k - 1].value)) ++breaks;
            detail += (k ? " " : "") + fmt(rows[k].value);
        }
        return Outcome{static_cast<double>(breaks), detail};
    });
    rec.check("potential_flow_patch", 0.0, [&] {
        PotentialFlowConfig pc;
        pc.grid = GridSpec::box(2, smoke ? 64 : 128, -1.0, 1.0);
        const PotentialFlowReport rep = potential_flow_scenario(pc);
        return Outcome{rep.passes ? 0.0 : 1.0, rep.passes ? "patch formed" : rep.note};
    });
    rec.check("nested_family_comparison", 1e-10, [&] {
        NestedConfig nc;
        nc.grid = GridSpec::box(2, smoke ? 40 : 64, -1.0, 1.0);
        nc.lower.disks.push_back({{0.0, 0.0}, 0.2});
        nc.upper.disks.push_back({{0.0, 0.0}, 0.3});
        nc.model_lower = constant_source(0.5);
        nc.model_upper = constant_source(1.0);
        nc.t_end = 0.1;
        const NestedReport rep = nested_family_comparison(nc);
        return Outcome{std::max(rep.density_violation, rep.pressure_violation), "density and pressure"};
    });
}

}  // namespace

std::vector<std::string> suite_names() {
    return {"core_grid", "flow", "pme", "hele_shaw", "barriers", "geometry", "convergence"};
}

std::vector<VerifyResult> run_suite(const std::string& name, const VerifyOptions& options) {
    std::vector<VerifyResult> out;
    if (name == "core_grid") {
        grid_suite(options, out);
    } else if (name == "flow") {
        flow_suite(options, out);
    } else if (name == "pme") {
        pme_suite(options, out);
    } else if (name == "hele_shaw") {
        hele_shaw_suite(options, out);
    } else if (name == "barriers") {
        barrier_suite(options, out);
    } else if (name == "geometry") {
        geometry_suite(options, out);
    } else if (name == "convergence") {
        convergence_suite(options, out);
    } else {
        throw ConfigError({"suite: unknown suite \"" + name + "\""});
    }
    return out;
}

std::vector<VerifyResult> verify_all(const VerifyOptions& options) {
    const auto names = suite_names();
    for (const auto& s : options.suites) {
        if (std::find(names.begin(), names.end(), s) == names.end()) {
            throw ConfigError({"suite: unknown suite \"" + s + "\""});
        }
    }
    std::vector<VerifyResult> out;
    for (const auto& name : names) {
        if (!options.suites.empty() && std::find(options.suites.begin(), options.suites.end(), name) == options.suites.end()) {
            continue;
        }
        auto rows = run_suite(name, options);
        out.insert(out.end(), rows.begin(), rows.end());
    }
    return out;
}

std::string verify_csv(const std::vector<VerifyResult>& results) {
    std::string s = "suite,test,status,worst,tolerance,detail\n";
    for (const auto& r : results) {
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), '"', '\'');
        s += r.suite + "," + r.test + "," + (r.passed ? "PASS" : "FAIL") + "," + fmt(r.worst) + "," + fmt(r.tolerance) +
             ",\"" + detail + "\"\n";
    }
    return s;
}

bool all_passed(const std::vector<VerifyResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const VerifyResult& r) { return r.passed; });
}

}  // namespace stiffpme::cli
