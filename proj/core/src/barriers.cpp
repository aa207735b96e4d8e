#include "stiffpme/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace stiffpme {

namespace {

struct Profile {
    double eta;
    Vec2 grad;
    double lap;
};

Profile radial_profile(RadialProfile kind, Vec2 y, int dim) {
    const double y2 = dot(y, y);
    if (kind == RadialProfile::kBumpDown) {
        if (y2 >= 1.0) return {0.0, {}, 0.0};
        return {1.0 - y2, -2.0 * y, -2.0 * dim};
    }
    return {1.0 + y2, 2.0 * y, 2.0 * dim};
}

double step_for(const DriftModel& model, double flow_step, double r) {
    return flow_step > 0.0 ? flow_step : default_flow_step(model, r / 100.0);
}

Vec2 streamline_point(const DriftModel& model, Vec2 x0, double t, double step) {
    if (model.zero_drift || t == 0.0) return x0;
    return flow_map(model, t, x0, step);
}

Vec2 drift_at(const DriftModel& model, Vec2 x) {
    return model.zero_drift ? Vec2{} : model.b(x);
}

}  // namespace

double density_barrier_eval(const DensityBarrier& bar, Vec2 x, double t) {
    const Vec2 X = streamline_point(bar.model, bar.x0, t, step_for(bar.model, bar.flow_step, bar.r));
    const double scale = bar.r * std::exp(-bar.L * t);
    const Vec2 y = (1.0 / scale) * (x - X);
    return bar.mu(t) * radial_profile(bar.profile, y, 2).eta;
}

BarrierResidual barrier_residual(const DensityBarrier& bar, const GridSpec& grid, double m, double t,
                                 double delta, double tol) {
    if (!(m > 1.0)) throw InvalidInput("barrier_residual: m must exceed 1");
    BarrierResidual out;
    out.field = ScalarField(grid, 0.0, t);
    out.worst = bar.is_subsolution() ? -std::numeric_limits<double>::infinity()
                                     : std::numeric_limits<double>::infinity();
    const int n = grid.dim();
    const Vec2 X = streamline_point(bar.model, bar.x0, t, step_for(bar.model, bar.flow_step, bar.r));
    const Vec2 bX = drift_at(bar.model, X);
    const double scale = bar.r * std::exp(-bar.L * t);
    const double mu = bar.mu(t);
    const double dmu = bar.mu_prime(t);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Vec2 x = grid.center(k);
        const Profile pr = radial_profile(bar.profile, (1.0 / scale) * (x - X), n);
        const double psi = mu * pr.eta;
        if (!(psi > 0.0 && psi < 1.0 - delta)) continue;
        const Vec2 grad = (mu / scale) * pr.grad;
        const double lap = mu / (scale * scale) * pr.lap;
        const double psi_t = dmu * pr.eta + dot(grad, -1.0 * bX + bar.L * (x - X));
        const double lap_m = m * (m - 1.0) * std::pow(psi, m - 2.0) * dot(grad, grad) + m * std::pow(psi, m - 1.0) * lap;
        const double div_flux = bar.model.zero_drift ? 0.0 : dot(grad, bar.model.b(x)) + psi * bar.model.div_b(x);
        const double res = psi_t - lap_m + div_flux - bar.model.f(x) * psi;
        out.field[k] = res;
        ++out.evaluated;
        out.worst = bar.is_subsolution() ? std::max(out.worst, res) : std::min(out.worst, res);
    }
    if (out.evaluated == 0) out.worst = 0.0;
    out.passes = bar.is_subsolution() ? out.worst <= tol : out.worst >= -tol;
    return out;
}

double barrier_m0_prescan(const DensityBarrier& bar, const GridSpec& grid, const std::vector<double>& times,
                          double delta, double tol, double m_start, double m_max) {
    for (double m = m_start; m <= m_max; m *= 2.0) {
        bool ok = true;
        for (double t : times) {
            if (!barrier_residual(bar, grid, m, t, delta, tol).passes) {
                ok = false;
                break;
            }
        }
        if (ok) return m;
    }
    return 0.0;
}

double pressure_barrier_eval(const PressureBarrier& bar, Vec2 x, double t) {
    const Vec2 X = streamline_point(bar.model, bar.x0, t, step_for(bar.model, bar.flow_step, bar.r));
    const double scale = bar.r * std::exp(-bar.L * t);
    const Vec2 d = x - X;
    return bar.mu(t) * std::max(0.0, 1.0 - dot(d, d) / (scale * scale));
}

std::vector<std::string> pressure_barrier_hypotheses(const PressureBarrier& bar, double m, double T, int dim,
                                                     int samples) {
    std::vector<std::string> issues;
    if (!(bar.kappa > 0.0)) issues.push_back("kappa must be positive");
    const double step = step_for(bar.model, bar.flow_step, bar.r);
    double inf_F = std::numeric_limits<double>::infinity();
    double max_mu = 0.0;
    bool growth_ok = true;
    const int radial = 8;
    const int angular = dim == 2 ? 16 : 2;
    for (int s = 0; s <= samples; ++s) {
        const double t = T * s / std::max(1, samples);
        const Vec2 X = streamline_point(bar.model, bar.x0, t, step);
        for (int a = 0; a <= radial; ++a) {
            const double rad = bar.r * a / radial;
            for (int q = 0; q < angular; ++q) {
                const double ang = 2.0 * std::numbers::pi * q / angular;
                const Vec2 x = dim == 2 ? X + rad * Vec2{std::cos(ang), std::sin(ang)} : X + Vec2{q == 0 ? rad : -rad, 0.0};
                inf_F = std::min(inf_F, bar.model.F(x));
            }
        }
        const double mu = bar.mu(t);
        max_mu = std::max(max_mu, mu);
        if (bar.mu_prime(t) > bar.kappa * (m - 1.0) * mu + 1e-12) growth_ok = false;
    }
    if (bar.kappa > 0.5 * inf_F * (1.0 + 1e-12)) {
        issues.push_back("kappa exceeds inf F / 2 = " + std::to_string(0.5 * inf_F) + " on the moving ball");
    }
    if (!growth_ok) issues.push_back("mu' <= kappa (m - 1) mu fails");
    if (2.0 * dim / (bar.r * bar.r) * std::exp(2.0 * bar.L * T) * max_mu > bar.kappa * (1.0 + 1e-12)) {
        issues.push_back("(2n / r^2) e^{2LT} max mu exceeds kappa");
    }
    return issues;
}

BarrierResidual pressure_barrier_residual(const PressureBarrier& bar, const GridSpec& grid, double m, double t,
                                          double tol) {
    BarrierResidual out;
    out.field = ScalarField(grid, 0.0, t);
    out.worst = -std::numeric_limits<double>::infinity();
    const int n = grid.dim();
    const Vec2 X = streamline_point(bar.model, bar.x0, t, step_for(bar.model, bar.flow_step, bar.r));
    const Vec2 bX = drift_at(bar.model, X);
    const double scale = bar.r * std::exp(-bar.L * t);
    const double mu = bar.mu(t);
    const double dmu = bar.mu_prime(t);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Vec2 x = grid.center(k);
        const Vec2 y = (1.0 / scale) * (x - X);
        const double eta = 1.0 - dot(y, y);
        if (!(eta > 0.0)) continue;
        const double pi = mu * eta;
        const Vec2 grad = (-2.0 * mu / scale) * y;
        const double lap = -2.0 * n * mu / (scale * scale);
        const double pi_t = dmu * eta + dot(grad, -1.0 * bX + bar.L * (x - X));
        const Vec2 bx = drift_at(bar.model, x);
        const double res = pi_t - (m - 1.0) * pi * (lap + bar.model.F(x)) - dot(grad, grad - bx);
        out.field[k] = res;
        ++out.evaluated;
        out.worst = std::max(out.worst, res);
    }
    if (out.evaluated == 0) out.worst = 0.0;
    out.passes = out.worst <= tol;
    return out;
}

double RadialHsSolution::radius(double time) const {
    if (t.empty()) return r0;
    if (time <= t.front()) return r.front();
    if (time >= t.back()) return r.back();
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
    const double h = t[i + 1] - t[i];
    const double s = (time - t[i]) / h;
    const double h00 = 2 * s * s * s - 3 * s * s + 1;
    const double h10 = s * s * s - 2 * s * s + s;
    const double h01 = -2 * s * s * s + 3 * s * s;
    const double h11 = s * s * s - s * s;
    return h00 * r[i] + h10 * h * dr[i] + h01 * r[i + 1] + h11 * h * dr[i + 1];
}

double RadialHsSolution::exterior_density(double time) const {
    return rho0 * std::exp(G0 * time);
}

RadialHsSolution radial_hs_solve(double eta, double rho0, double G0, double r0, double horizon,
                                 const RadialHsOptions& options) {
    if (!(eta >= 0.0)) throw InvalidInput("radial_hs_solve: eta must be nonnegative");
    if (!(rho0 >= 0.0 && rho0 < 1.0)) throw InvalidInput("radial_hs_solve: rho0 must lie in [0, 1)");
    if (!(G0 > 0.0)) throw InvalidInput("radial_hs_solve: G(0) must be positive");
    if (!(r0 > 0.0)) throw InvalidInput("radial_hs_solve: r0 must be positive");
    if (!(horizon >= 0.0)) throw InvalidInput("radial_hs_solve: horizon must be nonnegative");
    if (options.steps < 1) throw InvalidInput("radial_hs_solve: steps must be positive");

    RadialHsSolution sol;
    sol.eta = eta;
    sol.rho0 = rho0;
    sol.r0 = r0;
    sol.G0 = G0;
    sol.horizon = horizon;
    constexpr double kGapFloor = 1e-3;
    if (rho0 > 0.0) {
        const double t_sat = std::log((1.0 - kGapFloor) / rho0) / G0;
        if (t_sat < horizon) {
            sol.horizon = std::max(0.0, t_sat);
            sol.truncated = true;
            sol.notice = "exterior density reaches 1 before the horizon; truncated at t = " + std::to_string(sol.horizon);
        }
    }
    const double sign = options.exterior ? 1.0 : -1.0;
    auto slope = [&](double rad) { return options.eta_of_r ? options.eta_of_r(rad) : eta; };
    auto rhs = [&](double time, double rad) { return sign * slope(rad) / (1.0 - rho0 * std::exp(G0 * time)); };

    const double dt = sol.horizon / options.steps;
    double time = 0.0;
    double rad = r0;
    sol.t.push_back(time);
    sol.r.push_back(rad);
    sol.dr.push_back(rhs(time, rad));
    for (int k = 0; k < options.steps && dt > 0.0; ++k) {
        const double k1 = rhs(time, rad);
        const double k2 = rhs(time + 0.5 * dt, rad + 0.5 * dt * k1);
        const double k3 = rhs(time + 0.5 * dt, rad + 0.5 * dt * k2);
        const double k4 = rhs(time + dt, rad + dt * k3);
        const double next = rad + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (next <= 0.0) {
            sol.truncated = true;
            sol.horizon = time;
            sol.notice = "front reaches the origin; truncated at t = " + std::to_string(time);
            break;
        }
        time = (k + 1 == options.steps) ? sol.horizon : time + dt;
        rad = next;
        sol.t.push_back(time);
        sol.r.push_back(rad);
        sol.dr.push_back(rhs(time, rad));
    }

    const int n = options.dim;
    auto G = [&](double u) { return G0 - options.G_slope * u; };
    for (double tp : options.profile_times) {
        if (tp < 0.0 || tp > sol.horizon) continue;
        RadialProfileTable tab;
        tab.time = tp;
        tab.front = sol.radius(tp);
        double extent = options.profile_extent > 0.0 ? options.profile_extent : r0;
        const double dir = options.exterior ? -1.0 : 1.0;
        if (options.exterior) extent = std::min(extent, 0.99 * tab.front);
        const int pts = std::max(2, options.profile_points);
        const double ds = dir * extent / (pts - 1);
        double s = tab.front;
        double u = 0.0;
        double v = dir * slope(tab.front);  // du/ds, positive into the congested region
        auto acc = [&](double ss, double uu, double vv) { return -G(uu) - (n - 1) / ss * vv; };
        tab.s.push_back(s);
        tab.u.push_back(u);
        for (int q = 1; q < pts; ++q) {
            const double a1 = acc(s, u, v);
            const double u2 = u + 0.5 * ds * v, v2 = v + 0.5 * ds * a1;
            const double a2 = acc(s + 0.5 * ds, u2, v2);
            const double u3 = u + 0.5 * ds * v2, v3 = v + 0.5 * ds * a2;
            const double a3 = acc(s + 0.5 * ds, u3, v3);
            const double u4 = u + ds * v3, v4 = v + ds * a3;
            const double a4 = acc(s + ds, u4, v4);
            u += ds / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4);
            v += ds / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            s += ds;
            tab.s.push_back(s);
            tab.u.push_back(u);
        }
        sol.profiles.push_back(std::move(tab));
    }
    return sol;
}

ConvolutionResult moving_inf_convolution(const std::vector<ScalarField>& p, const DriftModel& model, Vec2 z,
                                         double r, double alpha, double R, bool sup) {
    if (!(r > 0.0 && R > r)) throw InvalidInput("moving_inf_convolution: need 0 < r < R");
    double tau = 0.0;
    for (const auto& f : p) tau = std::max(tau, std::abs(f.time()));
    const double lower = model.lipschitz_L * R;
    if (alpha < lower * (1.0 - 1e-12)) {
        throw InvalidInput("moving_inf_convolution: alpha below L R = " + std::to_string(lower));
    }
    if (tau > 0.0 && !(alpha < r / (2.0 * tau))) {
        throw InvalidInput("moving_inf_convolution: alpha must stay below r / (2 tau) = " +
                           std::to_string(r / (2.0 * tau)));
    }
    ConvolutionResult out;
    for (const auto& field : p) {
        const GridSpec& g = field.grid();
        const double h = g.h();
        const double t = field.time();
        const double rad = r / 2.0 - alpha * t;
        if (rad < h) out.degenerate = true;
        const Vec2 X = model.zero_drift ? z : flow_map(model, t, z, default_flow_step(model, h));
        std::vector<Vec2> offsets;
        const int reach = static_cast<int>(std::floor(rad / h));
        for (int b = (g.dim() == 2 ? -reach : 0); b <= (g.dim() == 2 ? reach : 0); ++b) {
            for (int a = -reach; a <= reach; ++a) {
                const Vec2 o{a * h, b * h};
                if (norm(o) <= rad + 1e-12) offsets.push_back(o);
            }
        }
        const Vec2 lo = g.origin() + Vec2{0.5 * h, g.dim() == 2 ? 0.5 * h : 0.0};
        const Vec2 hi = g.upper() - Vec2{0.5 * h, g.dim() == 2 ? 0.5 * h : 0.0};
        ScalarField w(g, 0.0, t);
        for (std::size_t k = 0; k < g.size(); ++k) {
            const Vec2 base = g.center(k) - X;
            double best = sup ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
            for (const Vec2& o : offsets) {
                Vec2 q = base + o;
                q.x = std::clamp(q.x, lo.x, hi.x);
                q.y = g.dim() == 2 ? std::clamp(q.y, lo.y, hi.y) : g.origin().y;
                const double v = interpolate(field, q);
                best = sup ? std::max(best, v) : std::min(best, v);
            }
            w[k] = best;
        }
        out.fields.push_back(std::move(w));
    }
    return out;
}

}  // namespace stiffpme
