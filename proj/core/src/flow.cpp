#include "stiffpme/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace stiffpme {

namespace {

constexpr double kMaxStepRatio = 1e7;

int step_count(double t, double step) {
    if (!(step > 0.0)) throw InvalidInput("flow: step must be positive");
    const double ratio = std::abs(t) / step;
    if (ratio > kMaxStepRatio) throw InvalidInput("flow: |t| / step exceeds 1e7");
    return std::max(1, static_cast<int>(std::ceil(ratio - 1e-12)));
}

Vec2 rk4(const VectorFn& b, Vec2 x, double dt) {
    const Vec2 k1 = b(x);
    const Vec2 k2 = b(x + 0.5 * dt * k1);
    const Vec2 k3 = b(x + 0.5 * dt * k2);
    const Vec2 k4 = b(x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void check_bounds(const std::optional<Box>& bounds, Vec2 x, Vec2 last, double t_last) {
    if (bounds && !bounds->contains(x)) throw EscapeError("flow: streamline left the bounding box", last, t_last);
}

DriftModel with_source(DriftModel m, const PresetParams& p, double div_value) {
    const double f = p.source_is_F ? p.source + div_value : p.source;
    m.f = [f](Vec2) { return f; };
    m.sup_f = std::abs(f);
    m.inf_F = f - div_value;
    m.sup_F = f - div_value;
    return m;
}

}  // namespace

DriftModel make_drift(const std::string& preset, int dim, const PresetParams& p) {
    if (dim != 1 && dim != 2) throw InvalidInput("make_drift: dimension must be 1 or 2");
    DriftModel m;
    m.name = preset;
    if (preset == "constant") {
        const Vec2 v = dim == 1 ? Vec2{p.velocity.x, 0.0} : p.velocity;
        m.b = [v](Vec2) { return v; };
        m.div_b = [](Vec2) { return 0.0; };
        m.lipschitz_L = 0.0;
        m.zero_drift = v.x == 0.0 && v.y == 0.0;
        return with_source(std::move(m), p, 0.0);
    }
    if (preset == "radial-sink" || preset == "potential") {
        // potential: b = -grad(|x|^2 / 2), the unit-strength sink.
        const double k = preset == "potential" ? 1.0 : p.rate;
        m.b = [k, dim](Vec2 x) { return dim == 1 ? Vec2{-k * x.x, 0.0} : -k * x; };
        const double div = -k * dim;
        m.div_b = [div](Vec2) { return div; };
        m.lipschitz_L = std::abs(k);
        m.zero_drift = k == 0.0;
        return with_source(std::move(m), p, div);
    }
    if (preset == "rotation") {
        if (dim != 2) throw InvalidInput("make_drift: rotation needs dim 2");
        const double w = p.omega;
        m.b = [w](Vec2 x) { return Vec2{-w * x.y, w * x.x}; };
        m.div_b = [](Vec2) { return 0.0; };
        m.lipschitz_L = std::abs(w);
        m.zero_drift = w == 0.0;
        return with_source(std::move(m), p, 0.0);
    }
    if (preset == "shear") {
        if (dim != 2) throw InvalidInput("make_drift: shear needs dim 2");
        const double s = p.shear;
        m.b = [s](Vec2 x) { return Vec2{s * x.y, 0.0}; };
        m.div_b = [](Vec2) { return 0.0; };
        m.lipschitz_L = std::abs(s);
        m.zero_drift = s == 0.0;
        return with_source(std::move(m), p, 0.0);
    }
    throw InvalidInput("make_drift: unknown preset '" + preset + "'");
}

std::vector<std::string> drift_preset_names() {
    return {"constant", "rotation", "radial-sink", "potential", "shear"};
}

double divergence_consistency_error(const DriftModel& model, const Box& box, int samples,
                                    std::uint64_t seed, int dim) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(box.lo.x, box.hi.x);
    std::uniform_real_distribution<double> uy(box.lo.y, box.hi.y);
    constexpr double eps = 1e-5;
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        const Vec2 x{ux(rng), dim == 2 ? uy(rng) : 0.0};
        double div = (model.b(x + Vec2{eps, 0}).x - model.b(x - Vec2{eps, 0}).x) / (2 * eps);
        if (dim == 2) div += (model.b(x + Vec2{0, eps}).y - model.b(x - Vec2{0, eps}).y) / (2 * eps);
        worst = std::max(worst, std::abs(div - model.div_b(x)));
    }
    return worst;
}

double min_F_on_grid(const DriftModel& model, const GridSpec& grid) {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) lo = std::min(lo, model.F(grid.center(k)));
    return lo;
}

double default_flow_step(const DriftModel& model, double h) {
    if (model.lipschitz_L <= 0.0) return h;
    return std::min(h, 1.0 / (10.0 * model.lipschitz_L));
}

Vec2 flow_map(const DriftModel& model, double t, Vec2 x0, double step, const std::optional<Box>& bounds) {
    if (t == 0.0 || model.zero_drift) {
        check_bounds(bounds, x0, x0, 0.0);
        return x0;
    }
    const int n = step_count(t, step);
    const double dt = t / n;
    Vec2 x = x0;
    for (int k = 0; k < n; ++k) {
        const Vec2 next = rk4(model.b, x, dt);
        check_bounds(bounds, next, x, k * dt);
        x = next;
    }
    return x;
}

Streamline trace_streamline(const DriftModel& model, Vec2 x0, double t, double step,
                            const std::optional<Box>& bounds) {
    Streamline s{x0, {{0.0, x0}}};
    if (t == 0.0) return s;
    const int n = step_count(t, step);
    const double dt = t / n;
    Vec2 x = x0;
    for (int k = 0; k < n; ++k) {
        const Vec2 next = model.zero_drift ? x : rk4(model.b, x, dt);
        check_bounds(bounds, next, x, k * dt);
        x = next;
        s.samples.emplace_back((k + 1) * dt, x);
    }
    return s;
}

double semigroup_residual(const DriftModel& model, Vec2 x0, double t, double s, double step,
                          const std::optional<Box>& bounds) {
    if (t == 0.0) return 0.0;
    const Vec2 direct = flow_map(model, s, x0, step, bounds);
    const Vec2 mid = flow_map(model, t, x0, step, bounds);
    const Vec2 composed = flow_map(model, s - t, mid, step, bounds);
    return distance(direct, composed);
}

Characteristic backward_characteristic(const DriftModel& model, Vec2 x, double t, double step,
                                       const std::optional<Box>& bounds) {
    if (t < 0.0) throw InvalidInput("backward_characteristic: t must be nonnegative");
    if (t == 0.0) return {x, 0.0};
    if (model.zero_drift) return {x, model.F(x) * t};
    const int n = step_count(t, step);
    const double ds = t / n;
    // Augmented system in reversed time s: z' = -b(z), l' = F(z).
    Vec2 z = x;
    double ell = 0.0;
    for (int k = 0; k < n; ++k) {
        const Vec2 k1 = -model.b(z);
        const double g1 = model.F(z);
        const Vec2 z2 = z + 0.5 * ds * k1;
        const Vec2 k2 = -model.b(z2);
        const double g2 = model.F(z2);
        const Vec2 z3 = z + 0.5 * ds * k2;
        const Vec2 k3 = -model.b(z3);
        const double g3 = model.F(z3);
        const Vec2 z4 = z + ds * k3;
        const Vec2 k4 = -model.b(z4);
        const double g4 = model.F(z4);
        const Vec2 next = z + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check_bounds(bounds, next, z, -k * ds);
        z = next;
        ell += (ds / 6.0) * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
    }
    return {z, ell};
}

double transport_density(const DriftModel& model, const ScalarFn& rhoE0, Vec2 x, double t, double step,
                         const std::optional<Box>& bounds) {
    if (t < 0.0) throw InvalidInput("transport_density: t must be nonnegative");
    const Characteristic c = backward_characteristic(model, x, t, step, bounds);
    const double r0 = rhoE0(c.foot);
    if (!(r0 >= 0.0 && r0 < 1.0)) throw InvalidInput("transport_density: initial exterior density outside [0, 1)");
    if (r0 == 0.0) return 0.0;
    return r0 * std::exp(c.log_growth);
}

SpreadCheck trajectory_spread_check(const DriftModel& model, Vec2 x, Vec2 y, double t, double step,
                                    const std::optional<Box>& bounds) {
    const double d0 = distance(x, y);
    const double grow = std::exp(model.lipschitz_L * std::abs(t));
    const double actual = distance(flow_map(model, t, x, step, bounds), flow_map(model, t, y, step, bounds));
    return {d0 / grow, actual, d0 * grow};
}

}  // namespace stiffpme
