#pragma once

#include <string>
#include <vector>

#include "stiffpme/flow.hpp"
#include "stiffpme/grid.hpp"
#include "stiffpme/hele_shaw.hpp"

namespace stiffpme {

struct Polyline {
    std::vector<Vec2> points;
    bool closed = false;
};

/// Marching squares over the cell-centre lattice for the level {u = iso}. Saddle squares are
/// resolved by the square average. Polylines are closed when they return to their start.
std::vector<Polyline> contour(const ScalarField& u, double iso = 0.0);

/// Total length; with `region`, only segments whose midpoint lies in a region cell count.
double contour_length(const std::vector<Polyline>& lines, const Mask* region = nullptr);

/// Mean distance of the contour vertices from `center`.
double mean_contour_radius(const std::vector<Polyline>& lines, Vec2 center);

/// Number of cell faces between a member and a non-member, times the face measure (h in 2D).
/// In 1D this is the number of transitions.
double face_count_perimeter(const Mask& mask, const Mask* region = nullptr);

/// Perimeter of the cell union: marching squares at 1/2 on the lightly smoothed indicator in 2D,
/// transition count in 1D. Empty mask gives 0.
double perimeter(const Mask& mask, const Mask* region = nullptr);

/// Perimeter of {phi <= 0} by marching squares on phi itself (sub-cell accurate).
double perimeter(const ScalarField& phi, const Mask* region = nullptr);

/// Symmetric Hausdorff distance between the boundary cell centres of a and b (cells with a
/// face neighbour outside the set). Throws InvalidInput if either mask is empty.
double hausdorff_distance(const Mask& a, const Mask& b);

/// Xi_r = {(x, t): max(|x| - r, 0)^2 + t^2 < r^2} with r(t) = r0 e^{-2Lt}.
struct FlattenedSetSpec {
    double r0 = 0.1;
    double L = 0.0;

    double r_of_t(double t) const;
    /// Unique solution of r(tau) = tau.
    double tau() const;
};

enum class ConvolutionMode { kSup, kInf };

/// Extremum of the series over the closed flattened set Xi_{r(t)}(x, t) for every slice with
/// t >= tau whose time window [t - r, t + r] is covered by the series. Slice k enters with
/// spatial radius r + sqrt(r^2 - (t_k - t)^2). Throws InvalidInput unless the output spacing is at
/// most r(t)/4 on the evaluated slices and at least one slice is covered.
std::vector<ScalarField> sup_inf_convolve(const std::vector<ScalarField>& series, const FlattenedSetSpec& spec,
                                          ConvolutionMode mode);

/// Spatial extremum over lattice offsets with |offset| <= radius (a static ball).
ScalarField ball_extremum(const ScalarField& u, double radius, ConvolutionMode mode);

enum class CheckStatus { kPass, kFail, kInconclusive };

struct PerimeterCheck {
    CheckStatus status = CheckStatus::kInconclusive;
    double time = 0.0;
    double measured = 0.0;
    double bound = 0.0;        ///< C / delta e^{(L + |f|) t}
    double patch_bound = 0.0;  ///< C e^{(n L + |f|) t}, reported for patch data
    double C = 0.0;
    std::string note;
};

/// Data constant max over r in {2h, 4h, 8h} of int((1 + r) sup_{B_r} rho0 - rho0) / r.
double estimate_perimeter_constant(const ScalarField& rho0);

/// Perimeter of the congested set of the last frame inside sigma against the bound. The
/// precondition rhoE <= 1 - delta on sigma outside the set is checked on every frame; if it fails
/// the status is inconclusive.
PerimeterCheck perimeter_bound_check(const std::vector<HsState>& history, const DriftModel& model,
                                     const Mask& sigma, double delta);

}  // namespace stiffpme
