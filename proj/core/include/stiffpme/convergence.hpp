#pragma once

#include <string>
#include <vector>

#include "stiffpme/flow.hpp"
#include "stiffpme/grid.hpp"
#include "stiffpme/hele_shaw.hpp"
#include "stiffpme/initial_data.hpp"
#include "stiffpme/pme.hpp"

namespace stiffpme {

struct FamilyConfig {
    GridSpec grid;
    RegularData data;
    DriftModel model;
    std::vector<double> m_list{5.0, 10.0, 20.0, 40.0, 80.0};
    double t_end = 1.0;
    std::vector<double> output_times;
    PmeOptions pme;
    HsOptions hs;
    bool run_hs = true;  ///< the reference needs inf F > 0
};

/// PME runs for every m plus the Hele-Shaw reference, all on one grid with one set of output times.
struct FamilyRun {
    GridSpec grid;
    DriftModel model;
    std::vector<double> m_list;
    std::vector<double> times;  ///< shared output times, initial time first
    std::vector<PmeRun> runs;   ///< one per m, in m_list order
    HsRun hs_reference;
    bool has_reference = false;

    const PmeState& state(std::size_t mi, double t) const;
    /// Limit density of the reference at t (chi_Omega + rhoE off Omega).
    ScalarField limit(double t) const;
    const HsState& reference(double t) const;
};

/// Runs each member separately (own dt sequence) and the reference. Throws InvalidInput if m_list
/// is not strictly increasing or its entries do not exceed 1.
FamilyRun run_family(const FamilyConfig& config);

struct FamilyRow {
    double m = 0.0;
    double t = 0.0;
    double value = 0.0;
};

/// l1_distance(rho_m(t), limit(t)) per m.
std::vector<FamilyRow> l1_limit_error(const FamilyRun& family, double t);

/// sup |rho_m - limit| over cells at least `margin` cells from the reference front, optionally
/// restricted to `region`. Throws InvalidInput for margin < 2.
std::vector<FamilyRow> uniform_error_away_from_front(const FamilyRun& family, double t, int margin,
                                                     const Mask* region = nullptr);

/// sup |p_m - p_HS| over `region`.
std::vector<FamilyRow> pressure_error(const FamilyRun& family, double t, const Mask& region);

/// max over output times of max_x p_m, per m.
std::vector<FamilyRow> pressure_maxima(const FamilyRun& family);

/// Hausdorff distance between {rho_m >= level} of consecutive family members at t; row m is the
/// larger exponent of each pair and NaN marks an empty set. At finite m the congested density is
/// ((m-1) p / m)^{1/(m-1)} < 1, so levels near 1 select nothing; the half level tracks the front.
std::vector<FamilyRow> congested_zone_gaps(const FamilyRun& family, double t, double level = 0.5);

/// Half-relaxed limit proxy from the largest m: max (upper) or min (lower) over the 3x3 cell
/// neighbourhood and the adjacent output frames.
ScalarField half_limit_proxy(const FamilyRun& family, double t, bool upper);

struct PatchReport {
    double max_intermediate = 0.0;  ///< largest value in (tol, 1 - tol) off the congested set
    int band_cells = 0;             ///< widest distance in cells of such values from the reference front
};

/// Limit densities of a run that starts with zero exterior density: intermediate values off the set.
PatchReport patch_preservation_check(const HsRun& run, double tol = 1e-6);

/// Band of intermediate PME values outside the reference congested set: cells with
/// tol < rho < 1 - tol, measured as the distance in cells to the reference front. Cells inside the
/// set are skipped because the finite-m congested density ((m-1) p / m)^{1/(m-1)} sits below 1.
PatchReport intermediate_band(const PmeState& state, const HsState& reference, double tol = 1e-3);

struct PotentialFlowConfig {
    GridSpec grid;
    double amplitude = 0.9;     ///< bump maximum at the origin
    double bump_radius = 0.25;
    double f = 1.0;
    double t_end = 2.0;
    bool patch_at_origin = false;  ///< replaces the bump with a congested disk of bump_radius
    HsOptions hs;
};

struct PotentialFlowReport {
    bool nucleated = false;
    double first_nucleation = -1.0;
    double predicted_nucleation = 0.0;  ///< ln(1 / amplitude) / (f + n)
    bool contains_support = false;      ///< final set covers every cell with |x| <= bump_radius
    double max_intermediate = 0.0;      ///< off a one-cell band around the front
    std::size_t events = 0;
    bool passes = false;
    std::string note;
    HsRun run;
};

/// b = -x, constant f: the exterior bump nucleates and the congested set swallows it.
PotentialFlowReport potential_flow_scenario(const PotentialFlowConfig& config);

struct NestedConfig {
    GridSpec grid;
    RegularData lower;
    RegularData upper;
    DriftModel model_lower;
    DriftModel model_upper;
    std::vector<double> m_list{5.0, 10.0, 20.0};
    double t_end = 0.2;
    std::vector<double> output_times;
    PmeOptions pme;
};

struct NestedReport {
    double density_violation = 0.0;
    double pressure_violation = 0.0;
    bool passes(double tol = 1e-10) const { return density_violation <= tol && pressure_violation <= tol; }
};

/// Lockstep runs of both configurations for every m. Throws InvalidInput unless the lower
/// congested set sits in the interior (one-cell erosion) of the upper one, the lower exterior
/// density is strictly below the upper one on its support, and f_lower < f_upper at every centre.
NestedReport nested_family_comparison(const NestedConfig& config);

struct SandwichRow {
    int k = 0;
    double initial_gap = 0.0;
    double gap = 0.0;  ///< int (rho+_{m,k} - rho-_{m,k})(t)
};

/// Upper data: congested set dilated by 1/k, exterior scaled by 1 + (1 - c_k)/k, source f + 1/k.
/// Lower data: congested set eroded by 1/k, everything else scaled by 1 - 1/k, source f - 1/k.
/// Both run in lockstep at exponent m.
std::vector<SandwichRow> sandwich_gaps(const GridSpec& grid, const RegularData& data, const DriftModel& model,
                                       double m, double t, const std::vector<int>& ks = {2, 4, 8},
                                       const PmeOptions& options = {});

/// Model with f shifted by a constant (F shifts with it).
DriftModel shift_source(const DriftModel& model, double delta);

}  // namespace stiffpme
