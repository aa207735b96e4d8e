#include "stiffpme/pme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace stiffpme {

namespace {

constexpr double kTimeEps = 1e-12;

void require_m(double m) {
    if (!(m > 1.0)) throw InvalidInput("pme: exponent m must exceed 1");
}

std::vector<double> normalized_outputs(std::vector<double> times, double t_end) {
    std::erase_if(times, [t_end](double t) { return !(t > kTimeEps) || t > t_end + kTimeEps; });
    if (t_end > kTimeEps) times.push_back(t_end);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
                times.end());
    return times;
}

/// Smallest boundary distance (in cells) of a cell above threshold, scanning only the rim.
int rim_margin(const ScalarField& rho, double threshold, int margin) {
    const GridSpec& g = rho.grid();
    int best = std::numeric_limits<int>::max();
    for (int j = 0; j < g.ny(); ++j) {
        const bool rim_row = g.dim() == 2 && (j < margin || j >= g.ny() - margin);
        for (int i = 0; i < g.nx(); ++i) {
            if (!rim_row && i >= margin && i < g.nx() - margin) {
                i = g.nx() - margin - 1;
                continue;
            }
            if (rho.at(i, j) > threshold) best = std::min(best, g.cells_to_boundary(i, j));
        }
    }
    return best;
}

void check_margin(const ScalarField& rho, const PmeOptions& opt) {
    if (opt.boundary_margin <= 0) return;
    if (rim_margin(rho, opt.support_threshold, opt.boundary_margin) < opt.boundary_margin) {
        throw NumericalAbort("pme: support reached within " + std::to_string(opt.boundary_margin) +
                             " cells of the domain boundary at t = " + std::to_string(rho.time()));
    }
}

}  // namespace

double pressure_of_density(double rho, double m) {
    require_m(m);
    if (!(rho >= 0.0)) throw InvalidInput("pressure_of_density: density must be nonnegative");
    return m / (m - 1.0) * std::pow(rho, m - 1.0);
}

double density_of_pressure(double p, double m) {
    require_m(m);
    if (!(p >= 0.0)) throw InvalidInput("density_of_pressure: pressure must be nonnegative");
    return std::pow((m - 1.0) * p / m, 1.0 / (m - 1.0));
}

ScalarField pressure_of_density(const ScalarField& rho, double m) {
    ScalarField out(rho.grid(), 0.0, rho.time());
    for (std::size_t k = 0; k < rho.size(); ++k) out[k] = pressure_of_density(rho[k], m);
    return out;
}

ScalarField density_of_pressure(const ScalarField& p, double m) {
    ScalarField out(p.grid(), 0.0, p.time());
    for (std::size_t k = 0; k < p.size(); ++k) out[k] = density_of_pressure(p[k], m);
    return out;
}

PmeStepper::PmeStepper(const GridSpec& grid, const DriftModel& model, double m, PmeOptions options)
    : grid_(grid), m_(m), options_(options) {
    require_m(m);
    const int nx = grid.nx();
    const int ny = grid.ny();
    const double h = grid.h();
    const Vec2 o = grid.origin();
    face_bx_.assign(static_cast<std::size_t>(nx + 1) * ny, 0.0);
    for (int j = 0; j < ny; ++j) {
        const double y = grid.dim() == 2 ? o.y + (j + 0.5) * h : o.y;
        // Boundary faces (i == 0, i == nx) stay zero: no flux through the domain boundary.
        for (int i = 1; i < nx; ++i) face_bx_[static_cast<std::size_t>(j) * (nx + 1) + i] = model.b({o.x + i * h, y}).x;
    }
    if (grid.dim() == 2) {
        face_by_.assign(static_cast<std::size_t>(nx) * (ny + 1), 0.0);
        for (int j = 1; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                face_by_[static_cast<std::size_t>(j) * nx + i] = model.b({o.x + (i + 0.5) * h, o.y + j * h}).y;
            }
        }
    }
    source_.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        source_[k] = model.f(grid.center(k));
        max_abs_f_ = std::max(max_abs_f_, std::abs(source_[k]));
    }
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t row = static_cast<std::size_t>(j) * (nx + 1);
            double out = std::max(face_bx_[row + i + 1], 0.0) + std::max(-face_bx_[row + i], 0.0);
            if (grid.dim() == 2) {
                out += std::max(face_by_[static_cast<std::size_t>(j + 1) * nx + i], 0.0) +
                       std::max(-face_by_[static_cast<std::size_t>(j) * nx + i], 0.0);
            }
            max_outflow_ = std::max(max_outflow_, out);
        }
    }
}

double PmeStepper::stability_bound(const ScalarField& rho) const {
    const double h = grid_.h();
    double rate = max_outflow_ / h + max_abs_f_;
    if (options_.scheme == PmeScheme::kExplicit) {
        const double rmax = std::max(rho.max(), 0.0);
        rate += 2.0 * grid_.dim() * m_ * std::pow(rmax, m_ - 1.0) / (h * h);
    }
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / rate;
}

double PmeStepper::source_integral(const ScalarField& rho) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < rho.size(); ++k) sum += source_[k] * rho[k];
    return sum * grid_.cell_volume();
}

void PmeStepper::explicit_fluxes(const ScalarField& rho, const std::vector<double>& u, double dt,
                                 bool with_diffusion, ScalarField& out) const {
    const int nx = grid_.nx();
    const int ny = grid_.ny();
    const double h = grid_.h();
    const double lam = dt / h;
    const double inv_h = with_diffusion ? 1.0 / h : 0.0;
    for (int j = 0; j < ny; ++j) {
        const std::size_t row = static_cast<std::size_t>(j) * nx;
        const double* bx = face_bx_.data() + static_cast<std::size_t>(j) * (nx + 1);
        for (int i = 0; i + 1 < nx; ++i) {
            const std::size_t k = row + i;
            const double b = bx[i + 1];
            const double flux = (u[k] - u[k + 1]) * inv_h + (b > 0.0 ? b * rho[k] : b * rho[k + 1]);
            out[k] -= lam * flux;
            out[k + 1] += lam * flux;
        }
    }
    if (grid_.dim() == 2) {
        for (int j = 0; j + 1 < ny; ++j) {
            const double* by = face_by_.data() + static_cast<std::size_t>(j + 1) * nx;
            for (int i = 0; i < nx; ++i) {
                const std::size_t k = static_cast<std::size_t>(j) * nx + i;
                const std::size_t kn = k + nx;
                const double b = by[i];
                const double flux = (u[k] - u[kn]) * inv_h + (b > 0.0 ? b * rho[k] : b * rho[kn]);
                out[k] -= lam * flux;
                out[kn] += lam * flux;
            }
        }
    }
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += dt * source_[k] * rho[k];
}

void PmeStepper::implicit_diffusion(const ScalarField& rho_old, double dt, ScalarField& rho) const {
    // Solve (I - dt div(D grad)) rho = rhs with D frozen at rho_old by Gauss-Seidel sweeps.
    const GridSpec& g = grid_;
    const double coef = dt / (g.h() * g.h());
    const double m = m_;
    auto face_d = [&](std::size_t a, std::size_t b) {
        const double ra = rho_old[a];
        const double rb = rho_old[b];
        if (std::abs(ra - rb) > 1e-12) return (std::pow(ra, m) - std::pow(rb, m)) / (ra - rb);
        return m * std::pow(0.5 * (ra + rb), m - 1.0);
    };
    std::vector<double> dx(g.size(), 0.0);
    std::vector<double> dy(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.i_of(k) + 1 < g.nx()) dx[k] = face_d(k, k + 1);
        if (g.dim() == 2 && g.j_of(k) + 1 < g.ny()) dy[k] = face_d(k, k + g.nx());
    }
    const ScalarField rhs = rho;
    const double scale = std::max(rhs.max(), 1e-300);
    auto diagonal = [&](std::size_t k) {
        double diag = 1.0;
        for_each_neighbor(g, k, [&](std::size_t nb, int axis, int side) {
            const std::size_t lo = side > 0 ? k : nb;
            diag += coef * (axis == 0 ? dx[lo] : dy[lo]);
        });
        return diag;
    };
    for (int sweep = 0; sweep < options_.implicit_max_sweeps; ++sweep) {
        double change = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            double diag = 1.0;
            double acc = rhs[k];
            for_each_neighbor(g, k, [&](std::size_t nb, int axis, int side) {
                const std::size_t lo = side > 0 ? k : nb;
                const double d = axis == 0 ? dx[lo] : dy[lo];
                diag += coef * d;
                acc += coef * d * rho[nb];
            });
            const double v = acc / diag;
            change = std::max(change, std::abs(v - rho[k]));
            rho[k] = v;
        }
        if (change <= options_.implicit_tolerance * scale) return;
    }

    // Large dt m rho^{m-1} / h^2 stalls the sweeps; the operator is symmetric positive definite, so
    // Jacobi-preconditioned conjugate gradients finish the solve from the swept iterate.
    const std::size_t n = g.size();
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (std::size_t k = 0; k < n; ++k) {
            double acc = diagonal(k) * x[k];
            for_each_neighbor(g, k, [&](std::size_t nb, int axis, int side) {
                const std::size_t lo = side > 0 ? k : nb;
                acc -= coef * (axis == 0 ? dx[lo] : dy[lo]) * x[nb];
            });
            y[k] = acc;
        }
    };
    std::vector<double> x(rho.values().begin(), rho.values().end());
    std::vector<double> inv_diag(n), r(n), z(n), dir(n), q(n);
    for (std::size_t k = 0; k < n; ++k) inv_diag[k] = 1.0 / diagonal(k);
    apply(x, q);
    double rhs_norm = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        r[k] = rhs[k] - q[k];
        z[k] = inv_diag[k] * r[k];
        dir[k] = z[k];
        rhs_norm = std::max(rhs_norm, std::abs(rhs[k]));
    }
    auto dotv = [n](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[k];
        return acc;
    };
    auto max_abs = [](const std::vector<double>& a) {
        double acc = 0.0;
        for (double v : a) acc = std::max(acc, std::abs(v));
        return acc;
    };
    // The residual is measured in the max norm, like the sweep change above.
    const double target = options_.implicit_tolerance * std::max(rhs_norm, 1e-300);
    double rz = dotv(r, z);
    const int max_iterations = 20 * static_cast<int>(std::sqrt(static_cast<double>(n))) + options_.implicit_max_sweeps;
    for (int it = 0; it < max_iterations && max_abs(r) > target; ++it) {
        apply(dir, q);
        const double alpha = rz / dotv(dir, q);
        for (std::size_t k = 0; k < n; ++k) {
            x[k] += alpha * dir[k];
            r[k] -= alpha * q[k];
            z[k] = inv_diag[k] * r[k];
        }
        const double rz_next = dotv(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t k = 0; k < n; ++k) dir[k] = z[k] + beta * dir[k];
    }
    const double residual = max_abs(r) / std::max(rhs_norm, 1e-300);
    if (residual > options_.implicit_tolerance * 1e3) {
        throw SolverError("pme: semi-implicit diffusion solve did not converge", residual);
    }
    for (std::size_t k = 0; k < n; ++k) rho[k] = x[k];
}

PmeState PmeStepper::step(const PmeState& state, double dt) const {
    if (!(state.rho.grid() == grid_)) throw InvalidInput("PmeStepper: state lives on a different grid");
    if (!(dt > 0.0)) throw InvalidInput("PmeStepper: dt must be positive");
    const double bound = stability_bound(state.rho);
    if (dt > bound * (1.0 + 1e-12)) {
        throw InvalidInput("PmeStepper: dt = " + std::to_string(dt) + " exceeds the stability bound " +
                           std::to_string(bound));
    }
    const ScalarField& rho = state.rho;
    const bool explicit_diffusion = options_.scheme == PmeScheme::kExplicit;
    std::vector<double> u(rho.size(), 0.0);
    if (explicit_diffusion) {
        for (std::size_t k = 0; k < rho.size(); ++k) u[k] = rho[k] > 0.0 ? std::pow(rho[k], m_) : 0.0;
    }
    PmeState next{rho, m_, state.time + dt};
    next.rho.set_time(next.time);
    explicit_fluxes(rho, u, dt, explicit_diffusion, next.rho);
    if (!explicit_diffusion) implicit_diffusion(rho, dt, next.rho);

    const double floor = -1e-12 * std::max(rho.max(), 1.0);
    for (std::size_t k = 0; k < next.rho.size(); ++k) {
        double& v = next.rho[k];
        if (!std::isfinite(v)) throw NumericalAbort("pme: non-finite density at t = " + std::to_string(next.time));
        if (v < 0.0) {
            if (v < floor) throw NumericalAbort("pme: negative density at t = " + std::to_string(next.time));
            v = 0.0;
        }
    }
    return next;
}

PmeState step(const PmeState& state, const DriftModel& model, double dt, const PmeOptions& options) {
    return PmeStepper(state.rho.grid(), model, state.m, options).step(state, dt);
}

const PmeState& PmeRun::at_time(double t) const {
    for (const auto& s : states) {
        if (std::abs(s.time - t) <= 1e-9) return s;
    }
    throw InvalidInput("PmeRun: no state at t = " + std::to_string(t));
}

std::vector<PmeRun> simulate_lockstep(const std::vector<PmeMember>& members, double m, double t_end,
                                      std::vector<double> output_times, const PmeOptions& options) {
    require_m(m);
    if (t_end < 0.0) throw InvalidInput("simulate: t_end must be nonnegative");
    if (members.empty()) return {};
    const GridSpec grid = members.front().init.rhoE0.grid();
    std::vector<PmeStepper> steppers;
    std::vector<PmeRun> runs(members.size());
    std::vector<PmeState> current;
    for (std::size_t a = 0; a < members.size(); ++a) {
        const auto& mem = members[a];
        if (!(mem.init.rhoE0.grid() == grid)) throw InvalidInput("simulate_lockstep: members must share a grid");
        mem.init.validate(options.boundary_margin);
        steppers.emplace_back(grid, mem.model, m, options);
        current.push_back(PmeState{mem.init.compose(), m, 0.0});
        runs[a].states.push_back(current.back());
        runs[a].mass_ledger.push_back({0.0, integrate(current.back().rho), steppers[a].source_integral(current.back().rho)});
    }
    const std::vector<double> outputs = normalized_outputs(std::move(output_times), t_end);
    std::size_t next_out = 0;
    double t = 0.0;
    while (next_out < outputs.size()) {
        double bound = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < members.size(); ++a) bound = std::min(bound, steppers[a].stability_bound(current[a].rho));
        double dt = options.dt_safety * bound;
        const double target = outputs[next_out];
        bool hit = false;
        if (t + dt >= target - kTimeEps * std::max(1.0, target)) {
            dt = target - t;
            hit = true;
        }
        for (std::size_t a = 0; a < members.size(); ++a) {
            current[a] = steppers[a].step(current[a], dt);
            if (hit) {
                current[a].time = target;
                current[a].rho.set_time(target);
            }
            check_margin(current[a].rho, options);
            runs[a].dt_history.push_back(dt);
        }
        t = hit ? target : t + dt;
        if (hit) {
            for (std::size_t a = 0; a < members.size(); ++a) {
                runs[a].states.push_back(current[a]);
                runs[a].mass_ledger.push_back({t, integrate(current[a].rho), steppers[a].source_integral(current[a].rho)});
            }
            ++next_out;
        }
    }
    return runs;
}

PmeRun simulate(const InitialData& init, const DriftModel& model, double m, double t_end,
                std::vector<double> output_times, const PmeOptions& options) {
    return std::move(simulate_lockstep({PmeMember{init, model}}, m, t_end, std::move(output_times), options).front());
}

ContractionStatistic contraction_statistic(const PmeRun& a, const PmeRun& b, const DriftModel& model, double t) {
    if (a.states.empty() || b.states.empty()) throw InvalidInput("contraction_statistic: empty run");
    if (!(a.states.front().rho.grid() == b.states.front().rho.grid()) || a.states.front().m != b.states.front().m) {
        throw InvalidInput("contraction_statistic: runs use different grids or exponents");
    }
    const double d0 = l1_distance(a.states.front().rho, b.states.front().rho);
    const double dt = l1_distance(a.at_time(t).rho, b.at_time(t).rho);
    return {dt, std::exp(t * model.sup_f) * d0};
}

double comparison_check(const PmeRun& a, const PmeRun& b, const DriftModel& model_a, const DriftModel& model_b) {
    if (a.states.size() != b.states.size() || a.states.empty()) throw InvalidInput("comparison_check: runs differ in length");
    const ScalarField& a0 = a.states.front().rho;
    const ScalarField& b0 = b.states.front().rho;
    if (!(a0.grid() == b0.grid())) throw InvalidInput("comparison_check: runs use different grids");
    for (std::size_t k = 0; k < a0.size(); ++k) {
        if (a0[k] > b0[k]) throw InvalidInput("comparison_check: initial data not ordered");
        const Vec2 c = a0.grid().center(k);
        if (model_a.f(c) > model_b.f(c)) throw InvalidInput("comparison_check: sources not ordered");
    }
    double worst = 0.0;
    for (std::size_t s = 0; s < a.states.size(); ++s) {
        if (std::abs(a.states[s].time - b.states[s].time) > 1e-12) throw InvalidInput("comparison_check: output times differ");
        const ScalarField& ra = a.states[s].rho;
        const ScalarField& rb = b.states[s].rho;
        for (std::size_t k = 0; k < ra.size(); ++k) worst = std::max(worst, ra[k] - rb[k]);
    }
    return worst;
}

}  // namespace stiffpme
