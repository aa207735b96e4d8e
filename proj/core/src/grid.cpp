#include "stiffpme/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace stiffpme {

namespace {

void require_same_grid(const ScalarField& a, const ScalarField& b, const char* op) {
    if (!(a.grid() == b.grid())) {
        throw InvalidInput(std::string(op) + ": fields live on different grids");
    }
}

}  // namespace

GridSpec GridSpec::line(int nx, double h, double ox) {
    if (nx < 4) throw InvalidInput("GridSpec: need at least 4 cells per axis");
    if (!(h > 0.0)) throw InvalidInput("GridSpec: spacing must be positive");
    GridSpec g;
    g.dim_ = 1;
    g.nx_ = nx;
    g.ny_ = 1;
    g.h_ = h;
    g.origin_ = {ox, 0.0};
    return g;
}

GridSpec GridSpec::plane(int nx, int ny, double h, Vec2 origin) {
    if (nx < 4 || ny < 4) throw InvalidInput("GridSpec: need at least 4 cells per axis");
    if (!(h > 0.0)) throw InvalidInput("GridSpec: spacing must be positive");
    GridSpec g;
    g.dim_ = 2;
    g.nx_ = nx;
    g.ny_ = ny;
    g.h_ = h;
    g.origin_ = origin;
    return g;
}

GridSpec GridSpec::box(int dim, int n, double lo, double hi) {
    if (!(hi > lo)) throw InvalidInput("GridSpec: empty box");
    const double h = (hi - lo) / n;
    if (dim == 1) return line(n, h, lo);
    if (dim == 2) return plane(n, n, h, {lo, lo});
    throw InvalidInput("GridSpec: dimension must be 1 or 2");
}

bool GridSpec::contains(Vec2 p) const {
    const Vec2 up = upper();
    if (p.x < origin_.x || p.x > up.x) return false;
    if (dim_ == 2 && (p.y < origin_.y || p.y > up.y)) return false;
    return true;
}

int GridSpec::cells_to_boundary(int i, int j) const {
    int d = std::min(i, nx_ - 1 - i);
    if (dim_ == 2) d = std::min({d, j, ny_ - 1 - j});
    return d;
}

ScalarField::ScalarField(GridSpec grid, double value, double time)
    : grid_(grid), values_(grid.size(), value), time_(time) {}

ScalarField::ScalarField(GridSpec grid, std::vector<double> values, double time)
    : grid_(grid), values_(std::move(values)), time_(time) {
    if (values_.size() != grid_.size()) throw InvalidInput("ScalarField: value count does not match grid");
}

ScalarField ScalarField::sample(const GridSpec& grid, const std::function<double(Vec2)>& fn, double time) {
    ScalarField out(grid, 0.0, time);
    for (std::size_t k = 0; k < grid.size(); ++k) out[k] = fn(grid.center(k));
    return out;
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Mask::Mask(GridSpec grid, bool value) : grid_(grid), cells_(grid.size(), value ? 1 : 0) {}

Mask Mask::where(const ScalarField& field, const std::function<bool(double)>& pred) {
    Mask m(field.grid());
    for (std::size_t k = 0; k < field.size(); ++k) m.set(k, pred(field[k]));
    return m;
}

Mask Mask::sample(const GridSpec& grid, const std::function<bool(Vec2)>& pred) {
    Mask m(grid);
    for (std::size_t k = 0; k < grid.size(); ++k) m.set(k, pred(grid.center(k)));
    return m;
}

std::size_t Mask::count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

double l1_distance(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b, "l1_distance");
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(a[k] - b[k]);
    return sum * a.grid().cell_volume();
}

ScalarField laplacian(const ScalarField& u) {
    const GridSpec& g = u.grid();
    const double inv_h2 = 1.0 / (g.h() * g.h());
    ScalarField out(g, 0.0, u.time());
    for (std::size_t k = 0; k < g.size(); ++k) {
        double acc = 0.0;
        // Missing neighbours are Neumann ghosts equal to u[k]; they contribute nothing.
        for_each_neighbor(g, k, [&](std::size_t nb, int, int) { acc += u[nb] - u[k]; });
        out[k] = acc * inv_h2;
    }
    return out;
}

double integrate(const ScalarField& u) {
    double sum = 0.0;
    for (double v : u.values()) sum += v;
    return sum * u.grid().cell_volume();
}

double interpolate(const ScalarField& u, Vec2 x) {
    const GridSpec& g = u.grid();
    if (!g.contains(x)) throw OutOfDomain("interpolate: point outside grid extent");
    const double h = g.h();
    auto axis_weights = [h](double coord, double origin, int n, int& i0, double& w) {
        const double s = (coord - origin) / h - 0.5;
        i0 = std::clamp(static_cast<int>(std::floor(s)), 0, n - 2);
        w = s - i0;
    };
    int i0 = 0;
    double wx = 0.0;
    axis_weights(x.x, g.origin().x, g.nx(), i0, wx);
    if (g.dim() == 1) return (1.0 - wx) * u.at(i0) + wx * u.at(i0 + 1);
    int j0 = 0;
    double wy = 0.0;
    axis_weights(x.y, g.origin().y, g.ny(), j0, wy);
    const double lo = (1.0 - wx) * u.at(i0, j0) + wx * u.at(i0 + 1, j0);
    const double hi = (1.0 - wx) * u.at(i0, j0 + 1) + wx * u.at(i0 + 1, j0 + 1);
    return (1.0 - wy) * lo + wy * hi;
}

Vec2 gradient_at(const ScalarField& u, std::size_t idx) {
    const GridSpec& g = u.grid();
    const int i = g.i_of(idx);
    const int j = g.j_of(idx);
    const double h = g.h();
    auto diff = [&](int n, int pos, std::size_t stride) {
        if (pos > 0 && pos + 1 < n) return (u[idx + stride] - u[idx - stride]) / (2.0 * h);
        if (pos == 0) return (u[idx + stride] - u[idx]) / h;
        return (u[idx] - u[idx - stride]) / h;
    };
    Vec2 grad{diff(g.nx(), i, 1), 0.0};
    if (g.dim() == 2) grad.y = diff(g.ny(), j, static_cast<std::size_t>(g.nx()));
    return grad;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b, "operator+");
    ScalarField out(a.grid(), 0.0, a.time());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + b[k];
    return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a, b, "operator-");
    ScalarField out(a.grid(), 0.0, a.time());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
    return out;
}

ScalarField operator*(double s, const ScalarField& a) {
    ScalarField out(a.grid(), 0.0, a.time());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = s * a[k];
    return out;
}

int support_margin(const ScalarField& u, double threshold) {
    const GridSpec& g = u.grid();
    int margin = std::numeric_limits<int>::max();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (u[k] > threshold) margin = std::min(margin, g.cells_to_boundary(g.i_of(k), g.j_of(k)));
    }
    return margin;
}

}  // namespace stiffpme
