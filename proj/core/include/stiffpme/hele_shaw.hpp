#pragma once

#include <cstdint>
#include <vector>

#include "stiffpme/flow.hpp"
#include "stiffpme/grid.hpp"
#include "stiffpme/initial_data.hpp"

namespace stiffpme {

struct PressureOptions {
    double tolerance = 1e-8;    ///< relative residual ||F - A p|| / ||F||
    int max_iterations = 100000;
    int sor_budget = 3000;      ///< SOR sweeps before switching to conjugate gradients
    double theta_min = 1e-3;    ///< clamp on the cut-face fraction
};

struct PressureSolveInfo {
    int iterations = 0;
    double residual = 0.0;
    bool used_cg = false;
};

/// -lap p = F on {phi <= 0}, p = 0 on the zero level set.
///
/// Faces whose far cell is outside the set are Dirichlet cut faces at fraction
/// theta = phi_i / (phi_i - phi_j) of the spacing, clamped below by theta_min. Faces on the domain
/// boundary are homogeneous Neumann. The matrix is symmetric positive definite. Red-black SOR runs
/// first and Jacobi-preconditioned CG takes over if it has not converged within sor_budget.
/// Throws InvalidInput if F <= 0 at a congested cell, SolverError if the tolerance is missed.
ScalarField solve_pressure(const ScalarField& phi, const DriftModel& model, const PressureOptions& options = {},
                           const ScalarField* warm_start = nullptr, PressureSolveInfo* info = nullptr);

/// Mask form: cut faces sit halfway between centres (theta = 1/2).
ScalarField solve_pressure(const Mask& omega, const DriftModel& model, const PressureOptions& options = {},
                           PressureSolveInfo* info = nullptr);

struct HsOptions {
    double cfl = 0.5;
    double dt_max = 0.01;
    double dt_min = 1e-5;        ///< sets the speed cap V_max = h / dt_min
    double near_one = 1e-3;      ///< 1 - rhoE below this counts as saturated
    int reinit_every = 5;
    int extension_band = 5;      ///< cells on each side of the front that receive V
    int boundary_margin = 4;
    double flow_step = 0.0;      ///< 0 selects default_flow_step
    PressureOptions pressure;
};

struct HsState {
    ScalarField phi;   ///< level set, Omega = {phi <= 0}
    Mask omega;
    ScalarField p;     ///< zero outside omega
    ScalarField rhoE;  ///< zero inside omega
    double time = 0.0;
    std::int64_t steps = 0;
};

struct NucleationEvent {
    double time = 0.0;
    std::size_t cells = 0;
    Vec2 centroid;
    bool new_component = false;  ///< no cell of the group touches the advected congested set
};

struct HsMassRecord {
    double time = 0.0;
    double congested_area = 0.0;  ///< sub-cell area of {phi <= 0}
    double exterior_mass = 0.0;
    double production = 0.0;      ///< int_Omega F + int_{Omega^c} f rhoE
};

struct HsRun {
    std::vector<HsState> frames;  ///< initial state first, then one per output time
    std::vector<NucleationEvent> events;
    std::vector<double> dt_history;
    std::vector<HsMassRecord> mass_ledger;
    double max_pressure_residual = 0.0;

    const HsState& at_time(double t) const;
};

/// Normal front speed on a band around the zero level set.
///
/// At interface cells V = max(0, -dp/dnu) / (1 - rhoE) + b . nu, with the outward normal of
/// phi, the pressure derivative from a one-sided quadratic through the Dirichlet crossing on cut
/// axes, and rhoE the largest value in the adjacent exterior cells. Where 1 - rhoE <= near_one, and
/// in general above h / dt_min, V is capped at h / dt_min. Band cells copy the value of the
/// interface cell nearest their projected front point.
ScalarField front_velocity(const HsState& state, const DriftModel& model, const HsOptions& options = {});

/// Free-boundary solver for the congested limit with exterior density transported by b.
class HeleShawSolver {
public:
    HeleShawSolver(GridSpec grid, DriftModel model, ScalarFn rhoE0, HsOptions options = {});

    /// Validates inf F > 0 and rhoE0 < 1 off the set, then solves the first pressure.
    HsState initial_state(const ScalarField& phi0) const;

    /// cfl * h / max|V|, capped by dt_max.
    double stable_dt(const HsState& state) const;

    /// One step: advect phi, transport rhoE, nucleate and absorb, reinitialise every
    /// reinit_every steps, re-solve the pressure. Throws InvalidInput if dt > h / max|V|.
    HsState advance(const HsState& state, double dt, std::vector<NucleationEvent>* events = nullptr,
                    PressureSolveInfo* info = nullptr) const;

    /// Adaptive run through the output times (t_end is always included).
    HsRun run(const HsState& initial, double t_end, std::vector<double> output_times) const;

    /// rhoE at time t on cells outside omega, recomputed by characteristics. Only cells within
    /// reach of the previous support (or of `previous_omega`) are evaluated when `previous` is given.
    ScalarField exterior_density(const Mask& omega, double t, const ScalarField* previous = nullptr,
                                 const Mask* previous_omega = nullptr, double dt = 0.0) const;

    HsMassRecord mass_record(const HsState& state) const;

    const GridSpec& grid() const { return grid_; }
    const DriftModel& model() const { return model_; }
    const HsOptions& options() const { return options_; }

private:
    GridSpec grid_;
    DriftModel model_;
    ScalarFn rhoE0_;
    HsOptions options_;
    double flow_step_ = 0.0;
    double max_drift_ = 0.0;
    bool exterior_everywhere_ = false;
};

/// chi_Omega + rhoE 1_{Omega^c}.
ScalarField limit_density(const HsState& state);

struct MonotonicityReport {
    int streamlines = 0;  ///< sampled streamlines that were deep inside the set at some frame
    int violations = 0;
    double worst_drop = 0.0;  ///< largest decrease of the membership indicator, 0 or 1

    double fraction() const { return streamlines > 0 ? static_cast<double>(violations) / streamlines : 0.0; }
};

/// Follows streamlines from uniformly drawn anchors through the frames until `samples` of them
/// have been deep inside the set (or 100 * samples anchors were drawn). A violation is a
/// streamline whose 3x3 cell neighbourhood lies fully inside the mask at some frame and fully
/// outside it two or more frames later (one cell and one frame of tolerance).
MonotonicityReport streamline_monotonicity_check(const std::vector<HsState>& frames, const DriftModel& model,
                                                 int samples, std::uint64_t seed);

}  // namespace stiffpme
