#include "stiffpme/hele_shaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "stiffpme/level_set.hpp"

namespace stiffpme {

namespace {

constexpr int kNone = -1;

struct PressureSystem {
    std::vector<std::size_t> cell;   ///< unknown -> grid index
    std::vector<int> nb;             ///< 4 per unknown, kNone when absent
    std::vector<double> diag;        ///< scaled by h^2
    std::vector<double> rhs;         ///< h^2 F
    std::vector<std::uint8_t> color;
    bool has_dirichlet = false;
};

double cut_theta(double phi_in, double phi_out, double theta_min) {
    const double a = std::abs(phi_in);
    const double b = std::abs(phi_out);
    const double t = a + b > 0.0 ? a / (a + b) : 0.5;
    return std::max(t, theta_min);
}

PressureSystem build_system(const Mask& omega, const ScalarField* phi, const DriftModel& model,
                            double theta_min) {
    const GridSpec& g = omega.grid();
    const double h2 = g.h() * g.h();
    PressureSystem sys;
    std::vector<int> unknown(g.size(), kNone);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!omega[k]) continue;
        unknown[k] = static_cast<int>(sys.cell.size());
        sys.cell.push_back(k);
    }
    const std::size_t n = sys.cell.size();
    sys.nb.assign(4 * n, kNone);
    sys.diag.assign(n, 0.0);
    sys.rhs.assign(n, 0.0);
    sys.color.assign(n, 0);
    for (std::size_t u = 0; u < n; ++u) {
        const std::size_t k = sys.cell[u];
        const Vec2 x = g.center(k);
        const double F = model.F(x);
        if (!(F > 0.0)) {
            throw InvalidInput("solve_pressure: F must be positive on the congested set, got " + std::to_string(F));
        }
        sys.rhs[u] = h2 * F;
        sys.color[u] = static_cast<std::uint8_t>((g.i_of(k) + g.j_of(k)) & 1);
        for_each_neighbor(g, k, [&](std::size_t nbk, int axis, int side) {
            const int slot = 2 * axis + (side > 0 ? 1 : 0);
            if (omega[nbk]) {
                sys.nb[4 * u + slot] = unknown[nbk];
                sys.diag[u] += 1.0;
            } else {
                const double theta = phi ? cut_theta((*phi)[k], (*phi)[nbk], theta_min) : 0.5;
                sys.diag[u] += 1.0 / theta;
                sys.has_dirichlet = true;
            }
        });
    }
    return sys;
}

double apply_row(const PressureSystem& s, const std::vector<double>& p, std::size_t u) {
    double acc = s.diag[u] * p[u];
    for (int q = 0; q < 4; ++q) {
        const int v = s.nb[4 * u + q];
        if (v != kNone) acc -= p[static_cast<std::size_t>(v)];
    }
    return acc;
}

double residual_norm(const PressureSystem& s, const std::vector<double>& p) {
    double acc = 0.0;
    for (std::size_t u = 0; u < p.size(); ++u) {
        const double r = s.rhs[u] - apply_row(s, p, u);
        acc += r * r;
    }
    return std::sqrt(acc);
}

double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc);
}

int sor(const PressureSystem& s, std::vector<double>& p, double omega_relax, double target, int budget,
        double& res) {
    const std::size_t n = p.size();
    int sweeps = 0;
    res = residual_norm(s, p);
    while (sweeps < budget && res > target) {
        for (std::uint8_t c = 0; c < 2; ++c) {
            for (std::size_t u = 0; u < n; ++u) {
                if (s.color[u] != c) continue;
                double sum = s.rhs[u];
                for (int q = 0; q < 4; ++q) {
                    const int v = s.nb[4 * u + q];
                    if (v != kNone) sum += p[static_cast<std::size_t>(v)];
                }
                p[u] += omega_relax * (sum / s.diag[u] - p[u]);
            }
        }
        ++sweeps;
        if (sweeps % 10 == 0) res = residual_norm(s, p);
    }
    res = residual_norm(s, p);
    return sweeps;
}

int conjugate_gradient(const PressureSystem& s, std::vector<double>& p, double target, int budget, double& res) {
    const std::size_t n = p.size();
    std::vector<double> r(n), z(n), d(n), q(n);
    for (std::size_t u = 0; u < n; ++u) r[u] = s.rhs[u] - apply_row(s, p, u);
    for (std::size_t u = 0; u < n; ++u) z[u] = r[u] / s.diag[u];
    d = z;
    double rz = 0.0;
    for (std::size_t u = 0; u < n; ++u) rz += r[u] * z[u];
    res = norm2(r);
    int it = 0;
    while (it < budget && res > target) {
        for (std::size_t u = 0; u < n; ++u) q[u] = apply_row(s, d, u);
        double dq = 0.0;
        for (std::size_t u = 0; u < n; ++u) dq += d[u] * q[u];
        if (!(dq > 0.0)) break;
        const double alpha = rz / dq;
        for (std::size_t u = 0; u < n; ++u) {
            p[u] += alpha * d[u];
            r[u] -= alpha * q[u];
        }
        double rz_new = 0.0;
        for (std::size_t u = 0; u < n; ++u) {
            z[u] = r[u] / s.diag[u];
            rz_new += r[u] * z[u];
        }
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t u = 0; u < n; ++u) d[u] = z[u] + beta * d[u];
        res = norm2(r);
        ++it;
    }
    res = residual_norm(s, p);
    return it;
}

ScalarField solve_system(const Mask& omega, const ScalarField* phi, const DriftModel& model,
                         const PressureOptions& options, const ScalarField* warm, PressureSolveInfo* info) {
    const GridSpec& g = omega.grid();
    ScalarField out(g, 0.0);
    PressureSystem sys = build_system(omega, phi, model, options.theta_min);
    PressureSolveInfo local;
    if (sys.cell.empty()) {
        if (info) *info = local;
        return out;
    }
    if (!sys.has_dirichlet) throw NumericalAbort("solve_pressure: congested set has no free boundary");

    std::vector<double> p(sys.cell.size(), 0.0);
    if (warm && warm->grid() == g) {
        for (std::size_t u = 0; u < p.size(); ++u) p[u] = std::max(0.0, (*warm)[sys.cell[u]]);
    }
    // Extent of the congested set sets the relaxation parameter.
    int imin = g.nx(), imax = -1, jmin = g.ny(), jmax = -1;
    for (std::size_t k : sys.cell) {
        imin = std::min(imin, g.i_of(k));
        imax = std::max(imax, g.i_of(k));
        jmin = std::min(jmin, g.j_of(k));
        jmax = std::max(jmax, g.j_of(k));
    }
    const int span = std::max(imax - imin, jmax - jmin) + 2;
    const double omega_relax = 2.0 / (1.0 + std::sin(std::numbers::pi / span));

    const double target = options.tolerance * norm2(sys.rhs);
    double res = 0.0;
    const int sor_budget = std::min(options.sor_budget, options.max_iterations);
    local.iterations = sor(sys, p, omega_relax, target, sor_budget, res);
    if (res > target) {
        local.used_cg = true;
        local.iterations += conjugate_gradient(sys, p, target, options.max_iterations - local.iterations, res);
    }
    local.residual = res / norm2(sys.rhs);
    if (info) *info = local;
    if (!(res <= target)) throw SolverError("solve_pressure: no convergence", local.residual);
    for (std::size_t u = 0; u < p.size(); ++u) out[sys.cell[u]] = std::max(0.0, p[u]);
    return out;
}

/// Derivative at s2 of the quadratic through (s0, v0), (s1, v1), (s2, 0).
double quadratic_slope_at_root(double s0, double v0, double s1, double v1, double s2) {
    const double d0 = ((s2 - s1)) / ((s0 - s1) * (s0 - s2));
    const double d1 = ((s2 - s0)) / ((s1 - s0) * (s1 - s2));
    return v0 * d0 + v1 * d1;
}

/// Pressure derivative along +axis at the front crossing on the `side` of cell (i, j).
double cut_derivative(const ScalarField& p, const Mask& omega, const ScalarField& phi, int i, int j, int axis,
                      int side, double theta_min) {
    const GridSpec& g = p.grid();
    const double h = g.h();
    const int di = axis == 0 ? side : 0;
    const int dj = axis == 1 ? side : 0;
    const std::size_t k = g.index(i, j);
    const std::size_t out = g.index(i + di, j + dj);
    const double theta = cut_theta(phi[k], phi[out], theta_min);
    auto inside = [&](int steps) {
        const int ii = i - steps * di;
        const int jj = j - steps * dj;
        if (ii < 0 || jj < 0 || ii >= g.nx() || jj >= g.ny()) return false;
        return omega.at(ii, jj);
    };
    auto value = [&](int steps) { return p.at(i - steps * di, j - steps * dj); };
    const double s2 = theta * h;
    double slope;
    if (theta < 0.5 && inside(1) && inside(2)) {
        slope = quadratic_slope_at_root(-2.0 * h, value(2), -h, value(1), s2);
    } else if (inside(1)) {
        slope = quadratic_slope_at_root(-h, value(1), 0.0, value(0), s2);
    } else {
        slope = -value(0) / s2;
    }
    return side > 0 ? slope : -slope;
}

Vec2 front_gradient(const ScalarField& p, const Mask& omega, const ScalarField& phi, std::size_t k,
                    double theta_min) {
    const GridSpec& g = p.grid();
    const int i = g.i_of(k);
    const int j = g.j_of(k);
    double comp[2] = {0.0, 0.0};
    for (int axis = 0; axis < g.dim(); ++axis) {
        const int n = g.cells(axis);
        const int c = axis == 0 ? i : j;
        auto idx = [&](int side) { return axis == 0 ? g.index(i + side, j) : g.index(i, j + side); };
        const bool has_m = c > 0;
        const bool has_p = c + 1 < n;
        const bool cut_m = has_m && !omega[idx(-1)];
        const bool cut_p = has_p && !omega[idx(+1)];
        if (cut_m && cut_p) {
            comp[axis] = 0.5 * (cut_derivative(p, omega, phi, i, j, axis, -1, theta_min) +
                                cut_derivative(p, omega, phi, i, j, axis, +1, theta_min));
        } else if (cut_p) {
            comp[axis] = cut_derivative(p, omega, phi, i, j, axis, +1, theta_min);
        } else if (cut_m) {
            comp[axis] = cut_derivative(p, omega, phi, i, j, axis, -1, theta_min);
        } else if (has_m && has_p) {
            comp[axis] = (p[idx(+1)] - p[idx(-1)]) / (2.0 * g.h());
        } else if (has_p) {
            comp[axis] = (p[idx(+1)] - p[k]) / g.h();
        } else if (has_m) {
            comp[axis] = (p[k] - p[idx(-1)]) / g.h();
        }
    }
    return {comp[0], comp[1]};
}

bool is_interface(const Mask& omega, std::size_t k) {
    if (!omega[k]) return false;
    bool edge = false;
    for_each_neighbor(omega.grid(), k, [&](std::size_t nb, int, int) { edge = edge || !omega[nb]; });
    return edge;
}

/// Projection of the cell centre onto the zero level set by one Newton step.
Vec2 front_point(const ScalarField& phi, std::size_t k) {
    const Vec2 grad = gradient_at(phi, k);
    const double g2 = dot(grad, grad);
    const Vec2 x = phi.grid().center(k);
    if (g2 <= 0.0) return x;
    return x - (phi[k] / g2) * grad;
}

void check_margin(const Mask& omega, int margin) {
    if (margin <= 0) return;
    const GridSpec& g = omega.grid();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (omega[k] && g.cells_to_boundary(g.i_of(k), g.j_of(k)) < margin) {
            throw NumericalAbort("hele_shaw: congested set reached within " + std::to_string(margin) +
                                 " cells of the boundary");
        }
    }
}

std::vector<std::uint8_t> dilate(const GridSpec& g, const std::vector<std::uint8_t>& in, int r) {
    std::vector<std::uint8_t> rows(g.size(), 0);
    for (int j = 0; j < g.ny(); ++j) {
        int last = -1000000;
        for (int i = 0; i < g.nx(); ++i) {
            if (in[g.index(i, j)]) last = i;
            if (i - last <= r) rows[g.index(i, j)] = 1;
        }
        last = 1000000;
        for (int i = g.nx() - 1; i >= 0; --i) {
            if (in[g.index(i, j)]) last = i;
            if (last - i <= r) rows[g.index(i, j)] = 1;
        }
    }
    if (g.dim() == 1) return rows;
    std::vector<std::uint8_t> out(g.size(), 0);
    for (int i = 0; i < g.nx(); ++i) {
        int last = -1000000;
        for (int j = 0; j < g.ny(); ++j) {
            if (rows[g.index(i, j)]) last = j;
            if (j - last <= r) out[g.index(i, j)] = 1;
        }
        last = 1000000;
        for (int j = g.ny() - 1; j >= 0; --j) {
            if (rows[g.index(i, j)]) last = j;
            if (last - j <= r) out[g.index(i, j)] = 1;
        }
    }
    return out;
}

}  // namespace

ScalarField solve_pressure(const ScalarField& phi, const DriftModel& model, const PressureOptions& options,
                           const ScalarField* warm_start, PressureSolveInfo* info) {
    return solve_system(sublevel_mask(phi), &phi, model, options, warm_start, info);
}

ScalarField solve_pressure(const Mask& omega, const DriftModel& model, const PressureOptions& options,
                           PressureSolveInfo* info) {
    return solve_system(omega, nullptr, model, options, nullptr, info);
}

ScalarField front_velocity(const HsState& state, const DriftModel& model, const HsOptions& options) {
    const GridSpec& g = state.phi.grid();
    const double h = g.h();
    const double v_max = h / options.dt_min;
    ScalarField V(g, 0.0, state.time);

    std::vector<std::size_t> front;
    std::vector<double> front_speed;
    std::vector<Vec2> front_pts;
    std::vector<int> owner(g.size(), kNone);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!is_interface(state.omega, k)) continue;
        const Vec2 nu = level_set_normal(state.phi, k);
        double speed = 0.0;
        if (norm(nu) > 0.0) {
            const Vec2 grad_p = front_gradient(state.p, state.omega, state.phi, k, options.pressure.theta_min);
            const double G = std::max(0.0, -dot(grad_p, nu));
            double rho_out = 0.0;
            for_each_neighbor(g, k, [&](std::size_t nb, int, int) {
                if (!state.omega[nb]) rho_out = std::max(rho_out, state.rhoE[nb]);
            });
            const double gap = 1.0 - rho_out;
            const Vec2 y = front_point(state.phi, k);
            if (gap <= options.near_one) {
                speed = v_max;
            } else {
                speed = G / gap + (model.zero_drift ? 0.0 : dot(model.b(y), nu));
            }
            speed = std::clamp(speed, -v_max, v_max);
        }
        owner[k] = static_cast<int>(front.size());
        front.push_back(k);
        front_speed.push_back(speed);
        front_pts.push_back(front_point(state.phi, k));
        V[k] = speed;
    }
    if (front.empty()) return V;

    const int band = options.extension_band;
    const double band_width = band * h;
    const int win = band + 1;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (owner[k] != kNone || std::abs(state.phi[k]) > band_width) continue;
        const Vec2 y = front_point(state.phi, k);
        const int i = g.i_of(k);
        const int j = g.j_of(k);
        double best = std::numeric_limits<double>::infinity();
        int best_id = kNone;
        const int jlo = g.dim() == 2 ? std::max(0, j - win) : 0;
        const int jhi = g.dim() == 2 ? std::min(g.ny() - 1, j + win) : 0;
        for (int jj = jlo; jj <= jhi; ++jj) {
            for (int ii = std::max(0, i - win); ii <= std::min(g.nx() - 1, i + win); ++ii) {
                const int id = owner[g.index(ii, jj)];
                if (id == kNone) continue;
                const double d = distance(front_pts[static_cast<std::size_t>(id)], y);
                if (d < best) {
                    best = d;
                    best_id = id;
                }
            }
        }
        if (best_id != kNone) V[k] = front_speed[static_cast<std::size_t>(best_id)];
    }
    return V;
}

const HsState& HsRun::at_time(double t) const {
    if (frames.empty()) throw InvalidInput("HsRun: no frames");
    const HsState* best = &frames.front();
    for (const auto& f : frames) {
        if (std::abs(f.time - t) < std::abs(best->time - t)) best = &f;
    }
    return *best;
}

HeleShawSolver::HeleShawSolver(GridSpec grid, DriftModel model, ScalarFn rhoE0, HsOptions options)
    : grid_(grid), model_(std::move(model)), rhoE0_(std::move(rhoE0)), options_(options) {
    if (grid_.size() == 0) throw InvalidInput("HeleShawSolver: empty grid");
    if (!(options_.cfl > 0.0 && options_.cfl <= 1.0)) throw InvalidInput("HeleShawSolver: cfl must be in (0, 1]");
    if (!(options_.dt_min > 0.0 && options_.dt_max >= options_.dt_min)) {
        throw InvalidInput("HeleShawSolver: need 0 < dt_min <= dt_max");
    }
    if (options_.reinit_every < 1) throw InvalidInput("HeleShawSolver: reinit_every must be >= 1");
    flow_step_ = options_.flow_step > 0.0 ? options_.flow_step : default_flow_step(model_, grid_.h());
    if (!model_.zero_drift) {
        for (std::size_t k = 0; k < grid_.size(); ++k) max_drift_ = std::max(max_drift_, norm(model_.b(grid_.center(k))));
    }
    for (std::size_t k = 0; k < grid_.size() && !exterior_everywhere_; ++k) {
        const int i = grid_.i_of(k);
        const int j = grid_.j_of(k);
        if (grid_.cells_to_boundary(i, j) == 0 && rhoE0_(grid_.center(k)) > 0.0) exterior_everywhere_ = true;
    }
}

ScalarField HeleShawSolver::exterior_density(const Mask& omega, double t, const ScalarField* previous,
                                             const Mask* previous_omega, double dt) const {
    ScalarField out(grid_, 0.0, t);
    std::vector<std::uint8_t> active(grid_.size(), 1);
    if (previous && !exterior_everywhere_) {
        std::vector<std::uint8_t> seed(grid_.size(), 0);
        for (std::size_t k = 0; k < grid_.size(); ++k) {
            seed[k] = ((*previous)[k] > 0.0 || (previous_omega && (*previous_omega)[k])) ? 1 : 0;
        }
        const int r = static_cast<int>(std::ceil(max_drift_ * dt / grid_.h())) + 1;
        active = dilate(grid_, seed, r);
    }
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        if (omega[k] || !active[k]) continue;
        const Vec2 x = grid_.center(k);
        double value;
        if (model_.zero_drift) {
            value = rhoE0_(x) * std::exp(t * model_.F(x));
        } else {
            const Characteristic c = backward_characteristic(model_, x, t, flow_step_);
            value = rhoE0_(c.foot) * std::exp(c.log_growth);
        }
        out[k] = std::max(0.0, value);
    }
    return out;
}

HsState HeleShawSolver::initial_state(const ScalarField& phi0) const {
    if (!(phi0.grid() == grid_)) throw InvalidInput("HeleShawSolver: level set grid mismatch");
    if (!phi0.all_finite()) throw InvalidInput("HeleShawSolver: level set has non-finite values");
    const double minF = min_F_on_grid(model_, grid_);
    if (!(minF > 0.0)) throw InvalidInput("HeleShawSolver: inf F must be positive, got " + std::to_string(minF));
    HsState s;
    s.phi = phi0;
    s.omega = sublevel_mask(phi0);
    s.time = phi0.time();
    s.rhoE = ScalarField(grid_, 0.0, s.time);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        if (s.omega[k]) continue;
        const double v = rhoE0_(grid_.center(k));
        if (!(v >= 0.0 && v < 1.0)) {
            throw InvalidInput("HeleShawSolver: exterior density must lie in [0, 1) off the congested set");
        }
        s.rhoE[k] = v;
    }
    check_margin(s.omega, options_.boundary_margin);
    s.p = solve_pressure(s.phi, model_, options_.pressure);
    s.p.set_time(s.time);
    return s;
}

double HeleShawSolver::stable_dt(const HsState& state) const {
    const ScalarField V = front_velocity(state, model_, options_);
    double vmax = 0.0;
    for (double v : V.values()) vmax = std::max(vmax, std::abs(v));
    double dt = options_.dt_max;
    if (vmax > 0.0) dt = std::min(dt, options_.cfl * grid_.h() / vmax);
    return dt;
}

HsState HeleShawSolver::advance(const HsState& state, double dt, std::vector<NucleationEvent>* events,
                                PressureSolveInfo* info) const {
    if (!(dt > 0.0)) throw InvalidInput("advance: dt must be positive");
    const double h = grid_.h();
    const ScalarField V = front_velocity(state, model_, options_);
    double vmax = 0.0;
    for (double v : V.values()) vmax = std::max(vmax, std::abs(v));
    if (vmax > 0.0 && dt > h / vmax * (1.0 + 1e-12)) {
        throw InvalidInput("advance: dt " + std::to_string(dt) + " exceeds the front CFL bound " +
                           std::to_string(h / vmax));
    }

    HsState next;
    next.time = state.time + dt;
    next.steps = state.steps + 1;
    next.phi = advect_normal(state.phi, V, dt);
    Mask advected = sublevel_mask(next.phi);
    next.rhoE = exterior_density(advected, next.time, &state.rhoE, &state.omega, dt);

    // Nucleation: every exterior cell at or above one joins the congested set.
    bool changed = false;
    std::vector<std::uint8_t> fresh(grid_.size(), 0);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        if (!advected[k] && next.rhoE[k] >= 1.0) fresh[k] = 1;
    }
    std::vector<std::uint8_t> seen(grid_.size(), 0);
    for (std::size_t k0 = 0; k0 < grid_.size(); ++k0) {
        if (!fresh[k0] || seen[k0]) continue;
        NucleationEvent ev;
        ev.time = next.time;
        ev.new_component = true;
        Vec2 sum{};
        std::vector<std::size_t> stack{k0};
        seen[k0] = 1;
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            ++ev.cells;
            sum = sum + grid_.center(k);
            for_each_neighbor(grid_, k, [&](std::size_t nb, int, int) {
                if (advected[nb]) ev.new_component = false;
                if (fresh[nb] && !seen[nb]) {
                    seen[nb] = 1;
                    stack.push_back(nb);
                }
            });
        }
        ev.centroid = (1.0 / static_cast<double>(ev.cells)) * sum;
        if (events) events->push_back(ev);
    }
    auto join = [&](std::size_t k) {
        next.phi[k] = std::min(next.phi[k], -0.5 * h);
        next.rhoE[k] = 0.0;
        for_each_neighbor(grid_, k, [&](std::size_t nb, int, int) {
            if (next.phi[nb] > 0.0) next.phi[nb] = std::min(next.phi[nb], 0.5 * h);
        });
        changed = true;
    };
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        if (fresh[k]) join(k);
    }
    // Saturated exterior cells touching the front are swallowed within the step.
    for (bool grew = true; grew;) {
        grew = false;
        for (std::size_t k = 0; k < grid_.size(); ++k) {
            if (next.phi[k] <= 0.0 || 1.0 - next.rhoE[k] >= options_.near_one) continue;
            bool touches = false;
            for_each_neighbor(grid_, k, [&](std::size_t nb, int, int) { touches = touches || next.phi[nb] <= 0.0; });
            if (touches) {
                join(k);
                grew = true;
            }
        }
    }

    if (changed || next.steps % options_.reinit_every == 0) next.phi = reinitialize(next.phi);
    next.phi.set_time(next.time);
    next.omega = sublevel_mask(next.phi);
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        if (next.omega[k]) next.rhoE[k] = 0.0;
    }
    check_margin(next.omega, options_.boundary_margin);
    next.p = solve_pressure(next.phi, model_, options_.pressure, &state.p, info);
    next.p.set_time(next.time);
    return next;
}

HsMassRecord HeleShawSolver::mass_record(const HsState& state) const {
    HsMassRecord r;
    r.time = state.time;
    const double vol = grid_.cell_volume();
    const double h = grid_.h();
    for (std::size_t k = 0; k < grid_.size(); ++k) {
        const double frac = inside_fraction(state.phi[k], h);
        const Vec2 x = grid_.center(k);
        r.congested_area += frac * vol;
        if (frac > 0.0) r.production += frac * model_.F(x) * vol;
        if (!state.omega[k] && state.rhoE[k] > 0.0) {
            r.exterior_mass += (1.0 - frac) * state.rhoE[k] * vol;
            r.production += (1.0 - frac) * model_.f(x) * state.rhoE[k] * vol;
        }
    }
    return r;
}

HsRun HeleShawSolver::run(const HsState& initial, double t_end, std::vector<double> output_times) const {
    if (!(t_end >= initial.time)) throw InvalidInput("run: t_end precedes the initial time");
    output_times.push_back(t_end);
    std::sort(output_times.begin(), output_times.end());
    std::vector<double> targets;
    for (double t : output_times) {
        if (t <= initial.time || t > t_end) continue;
        if (targets.empty() || t - targets.back() > 1e-12) targets.push_back(t);
    }
    HsRun run;
    run.frames.push_back(initial);
    run.mass_ledger.push_back(mass_record(initial));
    HsState state = initial;
    for (double target : targets) {
        while (target - state.time > 1e-12) {
            double dt = stable_dt(state);
            const double remaining = target - state.time;
            if (dt >= remaining) {
                dt = remaining;
            } else if (dt > 0.5 * remaining) {
                dt = 0.5 * remaining;
            }
            PressureSolveInfo info;
            state = advance(state, dt, &run.events, &info);
            if (dt == remaining) state.time = target;
            run.dt_history.push_back(dt);
            run.max_pressure_residual = std::max(run.max_pressure_residual, info.residual);
        }
        state.phi.set_time(state.time);
        state.rhoE.set_time(state.time);
        run.frames.push_back(state);
        run.mass_ledger.push_back(mass_record(state));
    }
    return run;
}

ScalarField limit_density(const HsState& state) {
    ScalarField out(state.phi.grid(), 0.0, state.time);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = state.omega[k] ? 1.0 : std::clamp(state.rhoE[k], 0.0, 1.0);
    }
    return out;
}

MonotonicityReport streamline_monotonicity_check(const std::vector<HsState>& frames, const DriftModel& model,
                                                 int samples, std::uint64_t seed) {
    MonotonicityReport rep;
    if (frames.size() < 2 || samples <= 0) return rep;
    const GridSpec& g = frames.front().phi.grid();
    const Box box = g.bounds();
    const double step = default_flow_step(model, g.h());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(box.lo.x, box.hi.x);
    std::uniform_real_distribution<double> uy(box.lo.y, box.hi.y);

    // Membership with a one-cell tolerance: deep = eroded mask, outside = beyond the dilated mask.
    auto classify = [&](const Mask& m, Vec2 x, bool& deep, bool& outside) {
        const int i = static_cast<int>(std::floor((x.x - g.origin().x) / g.h()));
        const int j = g.dim() == 2 ? static_cast<int>(std::floor((x.y - g.origin().y) / g.h())) : 0;
        int in_count = 0;
        int total = 0;
        for (int dj = (g.dim() == 2 ? -1 : 0); dj <= (g.dim() == 2 ? 1 : 0); ++dj) {
            for (int di = -1; di <= 1; ++di) {
                const int ii = i + di;
                const int jj = j + dj;
                if (ii < 0 || jj < 0 || ii >= g.nx() || jj >= g.ny()) continue;
                ++total;
                in_count += m.at(ii, jj) ? 1 : 0;
            }
        }
        deep = total > 0 && in_count == total;
        outside = in_count == 0;
    };

    const int max_draws = 100 * samples;
    for (int draw = 0; draw < max_draws && rep.streamlines < samples; ++draw) {
        Vec2 x{ux(rng), g.dim() == 2 ? uy(rng) : g.origin().y};
        int first_deep = -1;
        bool violated = false;
        try {
            for (std::size_t f = 0; f < frames.size(); ++f) {
                if (f > 0) {
                    const double dt = frames[f].time - frames[f - 1].time;
                    if (!model.zero_drift) x = flow_map(model, dt, x, step, box);
                }
                bool deep = false;
                bool outside = false;
                classify(frames[f].omega, x, deep, outside);
                if (deep && first_deep < 0) first_deep = static_cast<int>(f);
                if (outside && first_deep >= 0 && static_cast<int>(f) > first_deep + 1) violated = true;
            }
        } catch (const EscapeError&) {
            // Streamline left the domain; membership up to the exit is what was recorded.
        }
        if (first_deep >= 0) ++rep.streamlines;
        if (violated) {
            ++rep.violations;
            rep.worst_drop = 1.0;
        }
    }
    return rep;
}

}  // namespace stiffpme
