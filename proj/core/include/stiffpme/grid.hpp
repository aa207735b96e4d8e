#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "stiffpme/errors.hpp"
#include "stiffpme/vec.hpp"

namespace stiffpme {

/// Uniform Cartesian cell-centred grid in one or two dimensions.
///
/// Cell (i, j) has centre origin + ((i + 1/2) h, (j + 1/2) h). Storage is row-major with i
/// fastest. In 1D, ny() == 1 and the y coordinate of every centre is origin.y.
class GridSpec {
public:
    GridSpec() = default;

    static GridSpec line(int nx, double h, double ox);
    static GridSpec plane(int nx, int ny, double h, Vec2 origin);
    /// [lo, hi]^dim split into n cells per axis.
    static GridSpec box(int dim, int n, double lo, double hi);

    int dim() const { return dim_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int cells(int axis) const { return axis == 0 ? nx_ : ny_; }
    double h() const { return h_; }
    Vec2 origin() const { return origin_; }
    double extent(int axis) const { return cells(axis) * h_; }
    Vec2 upper() const { return {origin_.x + nx_ * h_, origin_.y + (dim_ == 2 ? ny_ * h_ : 0.0)}; }
    Box bounds() const { return {origin_, upper()}; }
    double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }

    std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
    std::size_t index(int i, int j = 0) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
    }
    int i_of(std::size_t idx) const { return static_cast<int>(idx % static_cast<std::size_t>(nx_)); }
    int j_of(std::size_t idx) const { return static_cast<int>(idx / static_cast<std::size_t>(nx_)); }

    Vec2 center(int i, int j = 0) const {
        return {origin_.x + (i + 0.5) * h_, dim_ == 2 ? origin_.y + (j + 0.5) * h_ : origin_.y};
    }
    Vec2 center(std::size_t idx) const { return center(i_of(idx), j_of(idx)); }

    /// Inside the closed extent [origin, origin + extent].
    bool contains(Vec2 p) const;
    /// Distance in cells from (i, j) to the nearest domain face, counting the cell itself as 0.
    int cells_to_boundary(int i, int j = 0) const;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int dim_ = 0;
    int nx_ = 0;
    int ny_ = 1;
    double h_ = 0.0;
    Vec2 origin_{};
};

/// Grid-sampled real function at one time stamp.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridSpec grid, double value = 0.0, double time = 0.0);
    ScalarField(GridSpec grid, std::vector<double> values, double time);

    static ScalarField sample(const GridSpec& grid, const std::function<double(Vec2)>& fn, double time = 0.0);

    const GridSpec& grid() const { return grid_; }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    std::size_t size() const { return values_.size(); }
    double& operator[](std::size_t idx) { return values_[idx]; }
    double operator[](std::size_t idx) const { return values_[idx]; }
    double& at(int i, int j = 0) { return values_[grid_.index(i, j)]; }
    double at(int i, int j = 0) const { return values_[grid_.index(i, j)]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    double max() const;
    double min() const;
    bool all_finite() const;

private:
    GridSpec grid_;
    std::vector<double> values_;
    double time_ = 0.0;
};

/// Boolean per-cell membership, a discrete subset of the domain.
class Mask {
public:
    Mask() = default;
    explicit Mask(GridSpec grid, bool value = false);

    static Mask where(const ScalarField& field, const std::function<bool(double)>& pred);
    static Mask sample(const GridSpec& grid, const std::function<bool(Vec2)>& pred);

    const GridSpec& grid() const { return grid_; }
    std::size_t size() const { return cells_.size(); }
    bool operator[](std::size_t idx) const { return cells_[idx] != 0; }
    bool at(int i, int j = 0) const { return cells_[grid_.index(i, j)] != 0; }
    void set(std::size_t idx, bool v) { cells_[idx] = v ? 1 : 0; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    /// Measure (area in 2D, length in 1D) of the cell union.
    double measure() const { return static_cast<double>(count()) * grid_.cell_volume(); }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    GridSpec grid_;
    std::vector<std::uint8_t> cells_;
};

/// Invoke fn(neighbour_index, axis, side) for each in-grid face neighbour of idx; side is -1 or +1.
template <class Fn>
void for_each_neighbor(const GridSpec& g, std::size_t idx, Fn&& fn) {
    const int i = g.i_of(idx);
    const int j = g.j_of(idx);
    if (i > 0) fn(idx - 1, 0, -1);
    if (i + 1 < g.nx()) fn(idx + 1, 0, +1);
    if (g.dim() == 2) {
        if (j > 0) fn(idx - static_cast<std::size_t>(g.nx()), 1, -1);
        if (j + 1 < g.ny()) fn(idx + static_cast<std::size_t>(g.nx()), 1, +1);
    }
}

/// Sum |a - b| h^n. Throws InvalidInput on grid mismatch.
double l1_distance(const ScalarField& a, const ScalarField& b);

/// (2 dim + 1)-point second difference with homogeneous Neumann ghost cells.
ScalarField laplacian(const ScalarField& u);

/// Midpoint rule, serial cell order.
double integrate(const ScalarField& u);

/// Multilinear interpolation from the surrounding cell centres; linear extrapolation inside the
/// half-cell rim so affine data is reproduced everywhere in the extent. Throws OutOfDomain.
double interpolate(const ScalarField& u, Vec2 x);

/// Central-difference gradient (one-sided at the boundary).
Vec2 gradient_at(const ScalarField& u, std::size_t idx);

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double s, const ScalarField& a);

/// Smallest distance in cells from a cell with value > threshold to the domain boundary,
/// or a large number if no such cell exists.
int support_margin(const ScalarField& u, double threshold);

}  // namespace stiffpme
