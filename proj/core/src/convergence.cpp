#include "stiffpme/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stiffpme/geometry.hpp"
#include "stiffpme/level_set.hpp"

namespace stiffpme {

namespace {

std::size_t nearest_index(const std::vector<double>& times, double t) {
    if (times.empty()) throw InvalidInput("family: no output times");
    std::size_t best = 0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (std::abs(times[k] - t) < std::abs(times[best] - t)) best = k;
    }
    return best;
}

/// Distance in cells from each centre to the zero level set of the reference.
std::vector<double> front_distance_cells(const HsState& ref) {
    const GridSpec& g = ref.phi.grid();
    const ScalarField d = reinitialize(ref.phi);
    std::vector<double> out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) out[k] = std::abs(d[k]) / g.h();
    return out;
}

/// Cells whose centre lies within `radius` of a member centre (Euclidean lattice dilation).
Mask dilate_mask(const Mask& m, double radius) {
    const GridSpec& g = m.grid();
    const int reach = static_cast<int>(std::ceil(radius / g.h()));
    Mask out(g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!m[k]) continue;
        const int i = g.i_of(k);
        const int j = g.j_of(k);
        for (int dj = (g.dim() == 2 ? -reach : 0); dj <= (g.dim() == 2 ? reach : 0); ++dj) {
            for (int di = -reach; di <= reach; ++di) {
                const int ii = i + di;
                const int jj = j + dj;
                if (ii < 0 || jj < 0 || ii >= g.nx() || jj >= g.ny()) continue;
                if (std::hypot(di, dj) * g.h() <= radius + 1e-12) out.set(g.index(ii, jj), true);
            }
        }
    }
    return out;
}

Mask complement(const Mask& m) {
    Mask out(m.grid());
    for (std::size_t k = 0; k < m.size(); ++k) out.set(k, !m[k]);
    return out;
}

Mask erode_mask(const Mask& m, double radius) {
    return complement(dilate_mask(complement(m), radius));
}

}  // namespace

DriftModel shift_source(const DriftModel& model, double delta) {
    DriftModel out = model;
    const ScalarFn f = model.f;
    out.f = [f, delta](Vec2 x) { return f(x) + delta; };
    out.sup_f = model.sup_f + std::abs(delta);
    out.inf_F = model.inf_F + delta;
    out.sup_F = model.sup_F + delta;
    return out;
}

const PmeState& FamilyRun::state(std::size_t mi, double t) const {
    if (mi >= runs.size()) throw InvalidInput("family: member index out of range");
    return runs[mi].at_time(t);
}

const HsState& FamilyRun::reference(double t) const {
    if (!has_reference) throw InvalidInput("family: no Hele-Shaw reference was run");
    return hs_reference.at_time(t);
}

ScalarField FamilyRun::limit(double t) const {
    return limit_density(reference(t));
}

FamilyRun run_family(const FamilyConfig& config) {
    if (config.m_list.empty()) throw InvalidInput("run_family: empty m list");
    for (std::size_t k = 0; k < config.m_list.size(); ++k) {
        if (!(config.m_list[k] > 1.0)) throw InvalidInput("run_family: every m must exceed 1");
        if (k > 0 && !(config.m_list[k] > config.m_list[k - 1])) {
            throw InvalidInput("run_family: m list must be strictly increasing");
        }
    }
    FamilyRun fam;
    fam.grid = config.grid;
    fam.model = config.model;
    fam.m_list = config.m_list;
    const InitialData init = config.data.sample(config.grid);
    for (double m : config.m_list) {
        fam.runs.push_back(simulate(init, config.model, m, config.t_end, config.output_times, config.pme));
    }
    for (const auto& s : fam.runs.front().states) fam.times.push_back(s.time);
    if (config.run_hs) {
        const RegularData data = config.data;
        HeleShawSolver solver(config.grid, config.model, [data](Vec2 x) { return data.exterior_density(x); },
                              config.hs);
        const HsState s0 = solver.initial_state(config.data.level_set(config.grid));
        fam.hs_reference = solver.run(s0, config.t_end, config.output_times);
        fam.has_reference = true;
    }
    return fam;
}

std::vector<FamilyRow> l1_limit_error(const FamilyRun& family, double t) {
    const ScalarField lim = family.limit(t);
    std::vector<FamilyRow> rows;
    for (std::size_t mi = 0; mi < family.m_list.size(); ++mi) {
        const PmeState& s = family.state(mi, t);
        rows.push_back({family.m_list[mi], s.time, l1_distance(s.rho, lim)});
    }
    return rows;
}

std::vector<FamilyRow> uniform_error_away_from_front(const FamilyRun& family, double t, int margin,
                                                     const Mask* region) {
    if (margin < 2) throw InvalidInput("uniform_error_away_from_front: margin must be at least 2");
    const HsState& ref = family.reference(t);
    const ScalarField lim = limit_density(ref);
    const std::vector<double> dist = front_distance_cells(ref);
    std::vector<FamilyRow> rows;
    for (std::size_t mi = 0; mi < family.m_list.size(); ++mi) {
        const PmeState& s = family.state(mi, t);
        double worst = 0.0;
        for (std::size_t k = 0; k < lim.size(); ++k) {
            if (dist[k] < margin) continue;
            if (region && !(*region)[k]) continue;
            worst = std::max(worst, std::abs(s.rho[k] - lim[k]));
        }
        rows.push_back({family.m_list[mi], s.time, worst});
    }
    return rows;
}

std::vector<FamilyRow> pressure_error(const FamilyRun& family, double t, const Mask& region) {
    const HsState& ref = family.reference(t);
    std::vector<FamilyRow> rows;
    for (std::size_t mi = 0; mi < family.m_list.size(); ++mi) {
        const PmeState& s = family.state(mi, t);
        const ScalarField p = pressure_of_density(s.rho, s.m);
        double worst = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (region[k]) worst = std::max(worst, std::abs(p[k] - ref.p[k]));
        }
        rows.push_back({family.m_list[mi], s.time, worst});
    }
    return rows;
}

std::vector<FamilyRow> pressure_maxima(const FamilyRun& family) {
    std::vector<FamilyRow> rows;
    for (std::size_t mi = 0; mi < family.m_list.size(); ++mi) {
        double worst = 0.0;
        double at = 0.0;
        for (const auto& s : family.runs[mi].states) {
            const double pm = pressure_of_density(s.rho, s.m).max();
            if (pm > worst) {
                worst = pm;
                at = s.time;
            }
        }
        rows.push_back({family.m_list[mi], at, worst});
    }
    return rows;
}

std::vector<FamilyRow> congested_zone_gaps(const FamilyRun& family, double t, double level) {
    std::vector<FamilyRow> rows;
    for (std::size_t mi = 1; mi < family.m_list.size(); ++mi) {
        const Mask a = Mask::where(family.state(mi - 1, t).rho, [level](double v) { return v >= level; });
        const Mask b = Mask::where(family.state(mi, t).rho, [level](double v) { return v >= level; });
        const double d = (a.empty() || b.empty()) ? std::numeric_limits<double>::quiet_NaN() : hausdorff_distance(a, b);
        rows.push_back({family.m_list[mi], family.state(mi, t).time, d});
    }
    return rows;
}

ScalarField half_limit_proxy(const FamilyRun& family, double t, bool upper) {
    const PmeRun& run = family.runs.back();
    const std::size_t k = nearest_index(family.times, t);
    const std::size_t lo = k > 0 ? k - 1 : 0;
    const std::size_t hi = std::min(run.states.size() - 1, k + 1);
    const GridSpec& g = family.grid;
    ScalarField out(g, upper ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity(),
                    family.times[k]);
    for (std::size_t f = lo; f <= hi; ++f) {
        const ScalarField& rho = run.states[f].rho;
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                double& cell = out.at(i, j);
                for (int dj = (g.dim() == 2 ? -1 : 0); dj <= (g.dim() == 2 ? 1 : 0); ++dj) {
                    for (int di = -1; di <= 1; ++di) {
                        const int ii = i + di;
                        const int jj = j + dj;
                        if (ii < 0 || jj < 0 || ii >= g.nx() || jj >= g.ny()) continue;
                        const double v = rho.at(ii, jj);
                        cell = upper ? std::max(cell, v) : std::min(cell, v);
                    }
                }
            }
        }
    }
    return out;
}

PatchReport patch_preservation_check(const HsRun& run, double tol) {
    PatchReport rep;
    for (const auto& frame : run.frames) {
        const ScalarField lim = limit_density(frame);
        for (std::size_t k = 0; k < lim.size(); ++k) {
            if (frame.omega[k]) continue;
            if (lim[k] > tol && lim[k] < 1.0 - tol) rep.max_intermediate = std::max(rep.max_intermediate, lim[k]);
        }
    }
    return rep;
}

PatchReport intermediate_band(const PmeState& state, const HsState& reference, double tol) {
    PatchReport rep;
    const std::vector<double> dist = front_distance_cells(reference);
    for (std::size_t k = 0; k < state.rho.size(); ++k) {
        if (reference.omega[k]) continue;
        const double v = state.rho[k];
        if (v > tol && v < 1.0 - tol) {
            rep.max_intermediate = std::max(rep.max_intermediate, v);
            rep.band_cells = std::max(rep.band_cells, static_cast<int>(std::ceil(dist[k] - 1e-9)));
        }
    }
    return rep;
}

PotentialFlowReport potential_flow_scenario(const PotentialFlowConfig& config) {
    PotentialFlowReport rep;
    const GridSpec& g = config.grid;
    PresetParams params;
    params.source = config.f;
    const DriftModel model = make_drift("potential", g.dim(), params);
    RegularData data;
    if (config.patch_at_origin) {
        data.disks.push_back({{0.0, 0.0}, config.bump_radius});
    } else {
        data.bumps.push_back({{0.0, 0.0}, config.bump_radius, config.amplitude});
    }
    rep.predicted_nucleation = config.amplitude > 0.0 ? std::log(1.0 / config.amplitude) / (config.f + g.dim()) : 0.0;
    HeleShawSolver solver(g, model, [data](Vec2 x) { return data.exterior_density(x); }, config.hs);
    const HsState s0 = solver.initial_state(data.level_set(g));
    std::vector<double> outs;
    const int frames = 20;
    for (int k = 1; k < frames; ++k) outs.push_back(config.t_end * k / frames);
    rep.run = solver.run(s0, config.t_end, outs);
    rep.events = rep.run.events.size();
    if (!s0.omega.empty()) {
        rep.nucleated = true;
        rep.first_nucleation = 0.0;
    } else if (!rep.run.events.empty()) {
        rep.nucleated = true;
        rep.first_nucleation = rep.run.events.front().time;
    }
    const HsState& last = rep.run.frames.back();
    rep.contains_support = true;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (norm(g.center(k)) <= config.bump_radius && !last.omega[k]) rep.contains_support = false;
    }
    const ScalarField lim = limit_density(last);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (last.omega[k]) continue;
        bool near_front = false;
        for_each_neighbor(g, k, [&](std::size_t nb, int, int) { near_front = near_front || last.omega[nb]; });
        if (near_front) continue;
        if (lim[k] > 1e-6 && lim[k] < 1.0 - 1e-6) rep.max_intermediate = std::max(rep.max_intermediate, lim[k]);
    }
    rep.passes = rep.nucleated && rep.contains_support && rep.max_intermediate <= 1e-6;
    if (!rep.nucleated) rep.note = "no nucleation by t_end";
    else if (!rep.contains_support) rep.note = "congested set does not cover the initial support";
    else if (rep.max_intermediate > 1e-6) rep.note = "exterior density survives off the front band";
    return rep;
}

NestedReport nested_family_comparison(const NestedConfig& config) {
    const GridSpec& g = config.grid;
    const InitialData a = config.lower.sample(g);
    const InitialData b = config.upper.sample(g);
    const Mask interior_b = erode_mask(b.omega0, g.h());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const Vec2 c = g.center(k);
        if (a.omega0[k] && !interior_b[k]) {
            throw InvalidInput("nested_family_comparison: lower congested set is not inside the upper interior");
        }
        if (!a.omega0[k] && a.rhoE0[k] > 0.0 && !b.omega0[k] && !(a.rhoE0[k] < b.rhoE0[k])) {
            throw InvalidInput("nested_family_comparison: exterior densities are not strictly ordered");
        }
        if (!(config.model_lower.f(c) < config.model_upper.f(c))) {
            throw InvalidInput("nested_family_comparison: sources are not strictly ordered");
        }
    }
    NestedReport rep;
    for (double m : config.m_list) {
        const auto runs = simulate_lockstep({PmeMember{a, config.model_lower}, PmeMember{b, config.model_upper}}, m,
                                            config.t_end, config.output_times, config.pme);
        rep.density_violation =
            std::max(rep.density_violation, comparison_check(runs[0], runs[1], config.model_lower, config.model_upper));
        for (std::size_t s = 0; s < runs[0].states.size(); ++s) {
            const ScalarField pa = pressure_of_density(runs[0].states[s].rho, m);
            const ScalarField pb = pressure_of_density(runs[1].states[s].rho, m);
            for (std::size_t k = 0; k < pa.size(); ++k) {
                rep.pressure_violation = std::max(rep.pressure_violation, pa[k] - pb[k]);
            }
        }
    }
    return rep;
}

std::vector<SandwichRow> sandwich_gaps(const GridSpec& grid, const RegularData& data, const DriftModel& model,
                                       double m, double t, const std::vector<int>& ks, const PmeOptions& options) {
    const InitialData base = data.sample(grid);
    const ScalarField rho0 = base.compose();
    std::vector<SandwichRow> rows;
    for (int k : ks) {
        if (k < 1) throw InvalidInput("sandwich_gaps: k must be positive");
        const double inv_k = 1.0 / k;
        const double reach = std::ceil(inv_k / grid.h()) * grid.h();
        InitialData up{dilate_mask(base.omega0, reach), ScalarField(grid)};
        InitialData lo{erode_mask(base.omega0, reach), ScalarField(grid)};
        double c_k = 0.0;
        for (std::size_t c = 0; c < grid.size(); ++c) {
            if (!up.omega0[c]) c_k = std::max(c_k, rho0[c]);
        }
        for (std::size_t c = 0; c < grid.size(); ++c) {
            up.rhoE0[c] = up.omega0[c] ? 0.0 : rho0[c] * (1.0 + (1.0 - c_k) * inv_k);
            lo.rhoE0[c] = lo.omega0[c] ? 0.0 : rho0[c] * (1.0 - inv_k);
        }
        const auto runs = simulate_lockstep({PmeMember{lo, shift_source(model, -inv_k)},
                                             PmeMember{up, shift_source(model, inv_k)}},
                                            m, t, {}, options);
        SandwichRow row;
        row.k = k;
        row.initial_gap = integrate(runs[1].states.front().rho - runs[0].states.front().rho);
        row.gap = integrate(runs[1].states.back().rho - runs[0].states.back().rho);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace stiffpme
