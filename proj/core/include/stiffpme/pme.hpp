#pragma once

#include <vector>

#include "stiffpme/flow.hpp"
#include "stiffpme/grid.hpp"
#include "stiffpme/initial_data.hpp"

namespace stiffpme {

/// Density of the m-problem at one time.
struct PmeState {
    ScalarField rho;
    double m = 2.0;
    double time = 0.0;
};

/// p = m / (m - 1) rho^{m - 1}.
double pressure_of_density(double rho, double m);
/// rho = ((m - 1) p / m)^{1 / (m - 1)}.
double density_of_pressure(double p, double m);
ScalarField pressure_of_density(const ScalarField& rho, double m);
ScalarField density_of_pressure(const ScalarField& p, double m);

enum class PmeScheme {
    kExplicit,
    /// Lagged-diffusivity implicit diffusion with explicit transport and reaction. Only the
    /// transport part constrains dt, at the cost of the strict discrete comparison property.
    kSemiImplicit,
};

struct PmeOptions {
    PmeScheme scheme = PmeScheme::kExplicit;
    double dt_safety = 0.9;
    /// Cells above this density count as support for the boundary-margin abort.
    double support_threshold = 1e-9;
    int boundary_margin = 4;
    int implicit_max_sweeps = 500;
    double implicit_tolerance = 1e-12;
};

/// Conservative monotone finite-volume update for rho_t - lap(rho^m) + div(rho b) = f rho.
///
/// Diffusive fluxes are face differences of u = rho^m, advective fluxes upwind rho times the
/// face-centred normal drift, the reaction is explicit. Boundary faces carry no flux.
class PmeStepper {
public:
    PmeStepper(const GridSpec& grid, const DriftModel& model, double m, PmeOptions options = {});

    /// Largest dt for which the explicit update is monotone:
    ///   1 / (2 dim m max(rho)^{m-1} / h^2 + max_cell_outflow / h + sup|f|).
    /// For the semi-implicit scheme the diffusion term is dropped.
    double stability_bound(const ScalarField& rho) const;

    /// One step. Throws InvalidInput if dt exceeds stability_bound, NumericalAbort on non-finite output.
    PmeState step(const PmeState& state, double dt) const;

    /// Integral of f rho, the exact discrete mass increment rate of the explicit update.
    double source_integral(const ScalarField& rho) const;

    double m() const { return m_; }
    const GridSpec& grid() const { return grid_; }
    const PmeOptions& options() const { return options_; }

private:
    void explicit_fluxes(const ScalarField& rho, const std::vector<double>& u, double dt,
                         bool with_diffusion, ScalarField& out) const;
    void implicit_diffusion(const ScalarField& rho_old, double dt, ScalarField& rho) const;

    GridSpec grid_;
    double m_;
    PmeOptions options_;
    std::vector<double> face_bx_;  ///< (nx + 1) * ny, normal drift on x faces
    std::vector<double> face_by_;  ///< nx * (ny + 1), normal drift on y faces
    std::vector<double> source_;   ///< f at cell centres
    double max_outflow_ = 0.0;
    double max_abs_f_ = 0.0;
};

/// Convenience single step that builds a stepper for this call.
PmeState step(const PmeState& state, const DriftModel& model, double dt, const PmeOptions& options = {});

struct MassRecord {
    double time = 0.0;
    double mass = 0.0;
    double source_integral = 0.0;  ///< int f rho at this time
};

struct PmeRun {
    std::vector<PmeState> states;  ///< initial state first, then one per output time
    std::vector<double> dt_history;
    std::vector<MassRecord> mass_ledger;

    const PmeState& at_time(double t) const;
};

/// Runs from max(chi_{omega0}, rhoE0) to t_end, with dt = dt_safety * stability bound clipped
/// to land on output times. Throws NumericalAbort if the support reaches the boundary margin.
PmeRun simulate(const InitialData& init, const DriftModel& model, double m, double t_end,
                std::vector<double> output_times, const PmeOptions& options = {});

struct PmeMember {
    InitialData init;
    DriftModel model;
};

/// Several runs advanced with one shared dt sequence (the minimum of the members' bounds),
/// so that discrete comparison and contraction between members are exact properties of the
/// monotone scheme.
std::vector<PmeRun> simulate_lockstep(const std::vector<PmeMember>& members, double m, double t_end,
                                      std::vector<double> output_times, const PmeOptions& options = {});

struct ContractionStatistic {
    double lhs = 0.0;  ///< ||rhoA(t) - rhoB(t)||_1
    double rhs = 0.0;  ///< e^{t sup|f|} ||rhoA(0) - rhoB(0)||_1
    bool passes(double rel_tol, double slack) const { return lhs <= rhs * (1.0 + rel_tol) + slack; }
};

/// Equal-source L1 contraction statistic at output time t.
ContractionStatistic contraction_statistic(const PmeRun& a, const PmeRun& b, const DriftModel& model, double t);

/// max over output times and cells of (rhoA - rhoB)_+. Throws InvalidInput unless
/// rhoA(0) <= rhoB(0) cellwise and fA <= fB at every cell centre.
double comparison_check(const PmeRun& a, const PmeRun& b, const DriftModel& model_a, const DriftModel& model_b);

}  // namespace stiffpme
