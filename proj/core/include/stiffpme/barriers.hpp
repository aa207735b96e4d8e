#pragma once

#include <functional>
#include <string>
#include <vector>

#include "stiffpme/flow.hpp"
#include "stiffpme/grid.hpp"

namespace stiffpme {

using TimeFn = std::function<double(double)>;

/// Radial profiles for density barriers.
enum class RadialProfile {
    kBumpDown,  ///< (1 - |y|^2)_+, nonincreasing, supported in the unit ball: subsolution variant
    kBumpUp,    ///< 1 + |y|^2, positive and nondecreasing: supersolution variant
};

/// psi(x, t) = mu(t) eta((x - X(t, x0)) / (r e^{-Lt})).
struct DensityBarrier {
    TimeFn mu;
    TimeFn mu_prime;
    RadialProfile profile = RadialProfile::kBumpDown;
    double r = 1.0;
    double L = 0.0;
    Vec2 x0;
    DriftModel model;
    double flow_step = 0.0;  ///< 0 selects default_flow_step(model, r / 100)

    bool is_subsolution() const { return profile == RadialProfile::kBumpDown; }
};

double density_barrier_eval(const DensityBarrier& bar, Vec2 x, double t);

struct BarrierResidual {
    ScalarField field;   ///< residual on evaluated cells, zero elsewhere
    double worst = 0.0;  ///< max for subsolutions, min for supersolutions
    int evaluated = 0;
    bool passes = true;
};

/// psi_t - lap(psi^m) + div(psi b) - f psi from analytic derivatives of psi, on the cells of
/// `grid` where 0 < psi < 1 - delta. Subsolutions pass when the residual is at most tol,
/// supersolutions when it is at least -tol.
BarrierResidual barrier_residual(const DensityBarrier& bar, const GridSpec& grid, double m, double t,
                                 double delta, double tol = 1e-6);

/// Smallest m = m_start 2^k (up to m_max) for which barrier_residual passes at every probe time;
/// returns 0 if none does. Only existence of such an m0 is known, so this scan is a heuristic.
double barrier_m0_prescan(const DensityBarrier& bar, const GridSpec& grid, const std::vector<double>& times,
                          double delta, double tol = 1e-6, double m_start = 2.0, double m_max = 4096.0);

/// pi(x, t) = mu(t) (1 - |x - X(t, x0)|^2 / (r^2 e^{-2Lt}))_+.
struct PressureBarrier {
    TimeFn mu;
    TimeFn mu_prime;
    double r = 1.0;
    double L = 0.0;
    Vec2 x0;
    double kappa = 0.0;
    DriftModel model;
    double flow_step = 0.0;
};

double pressure_barrier_eval(const PressureBarrier& bar, Vec2 x, double t);

/// Checks kappa <= inf F / 2 on the moving ball, mu' <= kappa (m - 1) mu and
/// (2n / r^2) e^{2LT} max mu <= kappa on `samples` points of [0, T].
/// Returns the list of violated hypotheses (empty when all hold).
std::vector<std::string> pressure_barrier_hypotheses(const PressureBarrier& bar, double m, double T, int dim,
                                                     int samples = 64);

/// p_t - (m-1) p (lap p + F) - grad p . (grad p - b) on {pi > 0}; subsolution passes when <= tol.
BarrierResidual pressure_barrier_residual(const PressureBarrier& bar, const GridSpec& grid, double m, double t,
                                          double tol = 1e-9);

struct RadialHsOptions {
    int dim = 2;
    /// Interior cylinder: the congested region is |x| > r(t) and r decreases.
    /// Exterior cylinder: the congested region is |x| < r(t) and r increases.
    bool exterior = false;
    double G_slope = 1.0;  ///< G(s) = G0 - G_slope s; 0 gives constant G
    int steps = 2000;      ///< RK4 steps over the horizon
    std::vector<double> profile_times;
    int profile_points = 200;
    double profile_extent = 0.0;  ///< radial length of tabulated profiles; 0 selects r0
    /// Front slope as a function of the radius; constant eta when empty.
    std::function<double(double)> eta_of_r;
};

struct RadialProfileTable {
    double time = 0.0;
    double front = 0.0;
    std::vector<double> s;
    std::vector<double> u;
};

struct RadialHsSolution {
    double eta = 0.0;
    double rho0 = 0.0;
    double r0 = 0.0;
    double G0 = 0.0;
    double horizon = 0.0;
    bool truncated = false;
    std::string notice;
    std::vector<double> t;
    std::vector<double> r;
    std::vector<double> dr;
    std::vector<RadialProfileTable> profiles;

    /// Cubic Hermite interpolation of the tabulated front.
    double radius(double time) const;
    double exterior_density(double time) const;
};

/// Front r' = -+eta / (1 - rho0 e^{G0 t}) by RK4 and, at each profile time, the radial pressure
/// from u'' + (n-1)/s u' = -G(u) with u(r(t)) = 0 and slope eta pointing into the congested
/// region. Throws InvalidInput for negative eta, non-positive r0/G0 or rho0 outside [0, 1). If the
/// exterior density reaches 1 or the front hits the origin before the horizon, the horizon is
/// truncated and `notice` says why.
RadialHsSolution radial_hs_solve(double eta, double rho0, double G0, double r0, double horizon,
                                 const RadialHsOptions& options = {});

struct ConvolutionResult {
    std::vector<ScalarField> fields;
    bool degenerate = false;  ///< ball radius fell below one cell at some time
};

/// w(x, t) = min over lattice offsets |h| <= r/2 - alpha t of p(x - X(t, z) + h, t) (max for the
/// sup variant), with bilinear sampling clamped to the grid. Requires
/// L R <= alpha < r / (2 tau) where tau is the largest |t| in the series; throws InvalidInput.
ConvolutionResult moving_inf_convolution(const std::vector<ScalarField>& p, const DriftModel& model, Vec2 z,
                                         double r, double alpha, double R, bool sup = false);

}  // namespace stiffpme
