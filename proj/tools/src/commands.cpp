#include "stiffpme_cli/commands.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "stiffpme/convergence.hpp"
#include "stiffpme/geometry.hpp"
#include "stiffpme/level_set.hpp"
#include "stiffpme_cli/output.hpp"

#ifndef STIFFPME_VERSION
#define STIFFPME_VERSION "unknown"
#endif

namespace stiffpme::cli {

namespace {

nlohmann::json manifest_head(const RunConfig& config, Command command) {
    nlohmann::json j;
    j["format"] = "stiffpme-manifest/1";
    j["command"] = command_name(command);
    j["code_version"] = STIFFPME_VERSION;
    j["config"] = config_echo(config);
    return j;
}

/// Frame times stored in the manifest next to the frame index used in file names.
template <class States>
nlohmann::json frame_list(const States& states) {
    nlohmann::json out = nlohmann::json::array();
    for (std::size_t k = 0; k < states.size(); ++k) out.push_back({{"index", k}, {"time", states[k].time}});
    return out;
}

/// Cells at least `margin` cells inside the reference set.
Mask eroded_reference(const HsState& ref, int margin) {
    const ScalarField d = reinitialize(ref.phi);
    const double h = d.grid().h();
    return Mask::where(d, [h, margin](double v) { return v <= -margin * h; });
}

}  // namespace

int simulate_pme_command(const RunConfig& config, const std::filesystem::path& out, std::ostream& log) {
    const GridSpec grid = config.grid.spec();
    const DriftModel model = config.model();
    const InitialData init = config.initial.sample(grid);
    const PmeRun run = simulate(init, model, config.m, config.t_end, config.output_times, config.pme);

    RunDirectory dir(out);
    for (std::size_t k = 0; k < run.states.size(); ++k) {
        const auto& s = run.states[k];
        dir.write_field(frame_name("rho", k, "spf1"), s.rho);
        ScalarField p = pressure_of_density(s.rho, s.m);
        p.set_time(s.time);
        dir.write_field(frame_name("p", k, "spf1"), p);
    }
    nlohmann::json m = manifest_head(config, Command::kSimulatePme);
    m["frames"] = frame_list(run.states);
    m["dt_history"] = dt_history_json(run.dt_history);
    m["mass_ledger"] = mass_ledger_json(run.mass_ledger);
    m["events"] = nlohmann::json::array();
    dir.write_manifest(m);
    log << "simulate-pme: " << run.dt_history.size() << " steps, " << run.states.size() << " frames -> "
        << out.string() << "\n";
    return kExitPass;
}

int simulate_hs_command(const RunConfig& config, const std::filesystem::path& out, std::ostream& log) {
    const GridSpec grid = config.grid.spec();
    const DriftModel model = config.model();
    const RegularData data = config.initial;
    HeleShawSolver solver(grid, model, [data](Vec2 x) { return data.exterior_density(x); }, config.hs);
    const HsState s0 = solver.initial_state(data.level_set(grid));
    const HsRun run = solver.run(s0, config.t_end, config.output_times);

    RunDirectory dir(out);
    for (std::size_t k = 0; k < run.frames.size(); ++k) {
        const auto& s = run.frames[k];
        auto stamped = [&](ScalarField f) {
            f.set_time(s.time);
            return f;
        };
        dir.write_field(frame_name("p", k, "spf1"), stamped(s.p));
        dir.write_field(frame_name("phi", k, "spf1"), stamped(s.phi));
        dir.write_field(frame_name("rhoE", k, "spf1"), stamped(s.rhoE));
        dir.write_field(frame_name("limit", k, "spf1"), stamped(limit_density(s)));
        if (grid.dim() == 2) dir.write_text(frame_name("front", k, "csv"), polylines_csv(contour(s.phi, 0.0)));
    }
    dir.write_text("events.csv", events_csv(run.events));
    nlohmann::json m = manifest_head(config, Command::kSimulateHs);
    m["frames"] = frame_list(run.frames);
    m["dt_history"] = dt_history_json(run.dt_history);
    m["mass_ledger"] = mass_ledger_json(run.mass_ledger);
    m["events"] = events_json(run.events);
    m["max_pressure_residual"] = run.max_pressure_residual;
    dir.write_manifest(m);
    log << "simulate-hs: " << run.dt_history.size() << " steps, " << run.events.size() << " nucleation events -> "
        << out.string() << "\n";
    return kExitPass;
}

int transport_command(const RunConfig& config, const std::filesystem::path& out, std::ostream& log) {
    const GridSpec grid = config.grid.spec();
    const DriftModel model = config.model();
    const RegularData data = config.initial;
    const ScalarFn rhoE0 = [data](Vec2 x) { return data.exterior_density(x); };
    const double step = config.flow_step > 0.0 ? config.flow_step : default_flow_step(model, grid.h());

    std::vector<double> times{0.0};
    for (double t : config.output_times) {
        if (t < config.t_end) times.push_back(t);
    }
    times.push_back(config.t_end);

    RunDirectory dir(out);
    nlohmann::json frames = nlohmann::json::array();
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double t = times[k];
        ScalarField rho = ScalarField::sample(
            grid, [&](Vec2 x) { return transport_density(model, rhoE0, x, t, step); }, t);
        dir.write_field(frame_name("rhoE", k, "spf1"), rho);
        frames.push_back({{"index", k}, {"time", t}});
    }
    std::string csv = "anchor,t,x,y\n";
    for (std::size_t a = 0; a < config.anchors.size(); ++a) {
        const Streamline s = trace_streamline(model, config.anchors[a], config.t_end, step);
        for (const auto& [t, x] : s.samples) csv += std::to_string(a) + "," + fmt(t) + "," + fmt(x.x) + "," + fmt(x.y) + "\n";
    }
    dir.write_text("streamlines.csv", csv);

    nlohmann::json m = manifest_head(config, Command::kTransport);
    m["frames"] = frames;
    m["flow_step"] = step;
    m["dt_history"] = dt_history_json({});
    m["mass_ledger"] = nlohmann::json::array();
    m["events"] = nlohmann::json::array();
    dir.write_manifest(m);
    log << "transport: " << times.size() << " frames, " << config.anchors.size() << " streamlines -> " << out.string()
        << "\n";
    return kExitPass;
}

int converge_command(const RunConfig& config, const std::filesystem::path& out, std::ostream& log) {
    FamilyConfig fc;
    fc.grid = config.grid.spec();
    fc.data = config.initial;
    fc.model = config.model();
    fc.m_list = config.m_list;
    fc.t_end = config.t_end;
    fc.output_times = config.output_times;
    fc.pme = config.pme;
    fc.hs = config.hs;
    fc.run_hs = config.run_hs;
    const FamilyRun fam = run_family(fc);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    const std::vector<FamilyRow> pmax = pressure_maxima(fam);
    std::vector<ConvergenceRow> rows;
    std::vector<OrderRow> order;
    for (double t : fam.times) {
        if (t <= 0.0) continue;
        std::vector<FamilyRow> l1, sup, pe;
        if (fam.has_reference) {
            l1 = l1_limit_error(fam, t);
            sup = uniform_error_away_from_front(fam, t, config.uniform_margin);
            pe = pressure_error(fam, t, eroded_reference(fam.reference(t), config.uniform_margin));
        }
        for (std::size_t mi = 0; mi < fam.m_list.size(); ++mi) {
            ConvergenceRow r;
            r.m = fam.m_list[mi];
            r.t = t;
            r.l1_error = fam.has_reference ? l1[mi].value : nan;
            r.sup_error = fam.has_reference ? sup[mi].value : nan;
            r.pressure_error = fam.has_reference ? pe[mi].value : nan;
            r.pressure_max = pmax[mi].value;
            rows.push_back(r);
        }
        const std::vector<FamilyRow> gaps = congested_zone_gaps(fam, t);
        for (std::size_t mi = 1; mi < fam.m_list.size(); ++mi) {
            OrderRow o;
            o.m_from = fam.m_list[mi - 1];
            o.m_to = fam.m_list[mi];
            o.t = t;
            o.l1_from = fam.has_reference ? l1[mi - 1].value : nan;
            o.l1_to = fam.has_reference ? l1[mi].value : nan;
            o.ratio = o.l1_to / o.l1_from;
            o.observed_order = std::log(o.l1_from / o.l1_to) / std::log(o.m_to / o.m_from);
            o.zone_gap = gaps[mi - 1].value;
            order.push_back(o);
        }
    }

    RunDirectory dir(out);
    dir.write_text("convergence.csv", convergence_csv(rows));
    dir.write_text("order.csv", order_csv(order));
    const double t_last = fam.times.back();
    for (std::size_t mi = 0; mi < fam.m_list.size(); ++mi) {
        dir.write_field("rho_m" + fmt(fam.m_list[mi]) + ".spf1", fam.state(mi, t_last).rho);
    }
    nlohmann::json m = manifest_head(config, Command::kConverge);
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t mi = 0; mi < fam.m_list.size(); ++mi) {
        members.push_back({{"m", fam.m_list[mi]},
                           {"dt_history", dt_history_json(fam.runs[mi].dt_history)},
                           {"mass_ledger", mass_ledger_json(fam.runs[mi].mass_ledger)}});
    }
    m["members"] = members;
    m["frames"] = fam.times;
    if (fam.has_reference) {
        ScalarField lim = fam.limit(t_last);
        lim.set_time(t_last);
        dir.write_field("limit.spf1", lim);
        dir.write_text("events.csv", events_csv(fam.hs_reference.events));
        m["reference"] = {{"dt_history", dt_history_json(fam.hs_reference.dt_history)},
                          {"mass_ledger", mass_ledger_json(fam.hs_reference.mass_ledger)}};
        m["events"] = events_json(fam.hs_reference.events);
    } else {
        dir.write_text("events.csv", events_csv({}));
        m["events"] = nlohmann::json::array();
    }
    dir.write_manifest(m);
    log << "converge: " << fam.m_list.size() << " members, " << rows.size() << " rows -> " << out.string() << "\n";
    return kExitPass;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return kExitConfigError;
    } catch (const InvalidInput& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const NumericalAbort& e) {
        err << "numerical abort: " << e.what() << "\n";
        return kExitNumericalAbort;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << " (residual " << e.residual() << ")\n";
        return kExitNumericalAbort;
    } catch (const EscapeError& e) {
        err << "streamline escape: " << e.what() << "\n";
        return kExitNumericalAbort;
    } catch (const OutOfDomain& e) {
        err << "out of domain: " << e.what() << "\n";
        return kExitNumericalAbort;
    }
}

}  // namespace stiffpme::cli
