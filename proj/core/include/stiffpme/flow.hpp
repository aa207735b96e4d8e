#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stiffpme/grid.hpp"

namespace stiffpme {

using VectorFn = std::function<Vec2(Vec2)>;
using ScalarFn = std::function<double(Vec2)>;

/// Autonomous drift b, its divergence, and the source f.
///
/// Callbacks are analytic; div_b must be the exact divergence of b. F = f - div b is the
/// compression rate that drives growth along streamlines.
struct DriftModel {
    std::string name;
    VectorFn b;
    ScalarFn div_b;
    ScalarFn f;
    double lipschitz_L = 0.0;
    double sup_f = 0.0;  ///< sup |f|
    double inf_F = 0.0;
    double sup_F = 0.0;
    bool zero_drift = false;  ///< b == 0 identically; lets the flow map short-circuit

    double F(Vec2 x) const { return f(x) - div_b(x); }
};

/// Parameters for the named presets. Unused entries are ignored.
struct PresetParams {
    Vec2 velocity{};       ///< constant
    double omega = 1.0;    ///< rotation rate
    double rate = 1.0;     ///< radial-sink strength k, b = -k x
    double shear = 1.0;    ///< shear, b = (s y, 0)
    double source = 0.0;   ///< constant f, or F itself when source_is_F
    bool source_is_F = false;
};

/// Presets: "constant", "rotation", "radial-sink", "potential", "shear".
/// With source_is_F the source is chosen as f = div b + source so that F is the given constant.
DriftModel make_drift(const std::string& preset, int dim, const PresetParams& params);

std::vector<std::string> drift_preset_names();

/// Largest central-difference error |div_h b - div_b| over `samples` random points in `box`.
double divergence_consistency_error(const DriftModel& model, const Box& box, int samples,
                                    std::uint64_t seed, int dim);

/// Minimum of F over the cell centres of `grid`.
double min_F_on_grid(const DriftModel& model, const GridSpec& grid);

/// min(h, 1 / (10 L)); h alone when L == 0.
double default_flow_step(const DriftModel& model, double h);

/// X(t, x0) for X' = b(X), by fixed-step classical RK4 (the step is shrunk to land on t).
/// Negative t integrates backward. Throws EscapeError if the path leaves `bounds`.
Vec2 flow_map(const DriftModel& model, double t, Vec2 x0, double step,
              const std::optional<Box>& bounds = std::nullopt);

struct Streamline {
    Vec2 anchor;
    std::vector<std::pair<double, Vec2>> samples;  ///< (t, X(t, anchor))
};

Streamline trace_streamline(const DriftModel& model, Vec2 x0, double t, double step,
                            const std::optional<Box>& bounds = std::nullopt);

/// |X(s, x0) - X(s - t, X(t, x0))|.
double semigroup_residual(const DriftModel& model, Vec2 x0, double t, double s, double step,
                          const std::optional<Box>& bounds = std::nullopt);

/// Exterior density at (x, t) by characteristics: the foot y = X(-t, x) and the growth
/// exp(int_0^t F(X(tau, y)) dtau) are integrated together backward from x, and the result is
/// rhoE0(y) times that growth. Throws InvalidInput if rhoE0(y) is outside [0, 1).
double transport_density(const DriftModel& model, const ScalarFn& rhoE0, Vec2 x, double t, double step,
                         const std::optional<Box>& bounds = std::nullopt);

/// Foot point and accumulated log-growth of the backward characteristic from (x, t).
struct Characteristic {
    Vec2 foot;
    double log_growth = 0.0;
};
Characteristic backward_characteristic(const DriftModel& model, Vec2 x, double t, double step,
                                       const std::optional<Box>& bounds = std::nullopt);

struct SpreadCheck {
    double lower = 0.0;
    double actual = 0.0;
    double upper = 0.0;
    bool passes(double eps = 1e-6) const { return lower - eps <= actual && actual <= upper + eps; }
};

/// (e^{-L|t|}|x-y|, |X(t,x) - X(t,y)|, e^{L|t|}|x-y|).
SpreadCheck trajectory_spread_check(const DriftModel& model, Vec2 x, Vec2 y, double t, double step,
                                    const std::optional<Box>& bounds = std::nullopt);

}  // namespace stiffpme
