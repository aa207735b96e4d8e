#include "stiffpme/level_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stiffpme {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Mask sublevel_mask(const ScalarField& phi) {
    Mask m(phi.grid());
    for (std::size_t k = 0; k < phi.size(); ++k) m.set(k, phi[k] <= 0.0);
    return m;
}

ScalarField reinitialize(const ScalarField& phi, int iterations) {
    const GridSpec& g = phi.grid();
    const double h = g.h();
    std::vector<double> d(g.size(), kInf);
    std::vector<std::uint8_t> fixed(g.size(), 0);
    bool any = false;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const bool in = phi[k] <= 0.0;
        double axis_dist[2] = {kInf, kInf};
        for_each_neighbor(g, k, [&](std::size_t nb, int axis, int) {
            if ((phi[nb] <= 0.0) == in) return;
            const double a = std::abs(phi[k]);
            const double b = std::abs(phi[nb]);
            const double theta = a + b > 0.0 ? a / (a + b) : 0.0;
            axis_dist[axis] = std::min(axis_dist[axis], theta * h);
        });
        const double dx = axis_dist[0];
        const double dy = axis_dist[1];
        if (dx == kInf && dy == kInf) continue;
        any = true;
        fixed[k] = 1;
        if (dx == kInf) d[k] = dy;
        else if (dy == kInf) d[k] = dx;
        else if (dx == 0.0 || dy == 0.0) d[k] = 0.0;
        else d[k] = 1.0 / std::sqrt(1.0 / (dx * dx) + 1.0 / (dy * dy));
    }
    if (!any) return phi;

    const int nx = g.nx();
    const int ny = g.ny();
    auto at = [&](int i, int j) { return d[g.index(i, j)]; };
    auto update = [&](int i, int j) {
        const std::size_t k = g.index(i, j);
        if (fixed[k]) return;
        const double a = std::min(i > 0 ? at(i - 1, j) : kInf, i + 1 < nx ? at(i + 1, j) : kInf);
        double cand;
        if (g.dim() == 1) {
            cand = a + h;
        } else {
            const double b = std::min(j > 0 ? at(i, j - 1) : kInf, j + 1 < ny ? at(i, j + 1) : kInf);
            if (a == kInf && b == kInf) return;
            if (std::abs(a - b) >= h) {
                cand = std::min(a, b) + h;
            } else {
                const double diff = a - b;
                cand = 0.5 * (a + b + std::sqrt(2.0 * h * h - diff * diff));
            }
        }
        d[k] = std::min(d[k], cand);
    };
    for (int it = 0; it < iterations; ++it) {
        for (int sx : {1, -1}) {
            for (int sy : {1, -1}) {
                if (g.dim() == 1 && sy < 0) continue;
                for (int jj = 0; jj < ny; ++jj) {
                    const int j = sy > 0 ? jj : ny - 1 - jj;
                    for (int ii = 0; ii < nx; ++ii) update(sx > 0 ? ii : nx - 1 - ii, j);
                }
            }
        }
    }
    ScalarField out(g, 0.0, phi.time());
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double mag = d[k] == kInf ? std::abs(phi[k]) : d[k];
        out[k] = phi[k] <= 0.0 ? -mag : mag;
        // Keep strictly positive cells strictly positive.
        if (phi[k] > 0.0 && out[k] == 0.0) out[k] = std::numeric_limits<double>::min();
    }
    return out;
}

ScalarField advect_normal(const ScalarField& phi, const ScalarField& speed, double dt) {
    const GridSpec& g = phi.grid();
    const double inv_h = 1.0 / g.h();
    const int nx = g.nx();
    const int ny = g.ny();
    ScalarField out = phi;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = g.index(i, j);
            const double v = speed[k];
            if (v == 0.0) continue;
            const double dxm = i > 0 ? (phi[k] - phi[k - 1]) * inv_h : 0.0;
            const double dxp = i + 1 < nx ? (phi[k + 1] - phi[k]) * inv_h : 0.0;
            double dym = 0.0;
            double dyp = 0.0;
            if (g.dim() == 2) {
                dym = j > 0 ? (phi[k] - phi[k - nx]) * inv_h : 0.0;
                dyp = j + 1 < ny ? (phi[k + nx] - phi[k]) * inv_h : 0.0;
            }
            double grad2;
            if (v > 0.0) {
                grad2 = std::pow(std::max(dxm, 0.0), 2) + std::pow(std::min(dxp, 0.0), 2) +
                        std::pow(std::max(dym, 0.0), 2) + std::pow(std::min(dyp, 0.0), 2);
            } else {
                grad2 = std::pow(std::min(dxm, 0.0), 2) + std::pow(std::max(dxp, 0.0), 2) +
                        std::pow(std::min(dym, 0.0), 2) + std::pow(std::max(dyp, 0.0), 2);
            }
            out[k] = phi[k] - dt * v * std::sqrt(grad2);
        }
    }
    return out;
}

Vec2 level_set_normal(const ScalarField& phi, std::size_t idx) {
    const Vec2 g = gradient_at(phi, idx);
    const double n = norm(g);
    if (n <= 0.0) return {};
    return (1.0 / n) * g;
}

double inside_fraction(double phi, double h) {
    return std::clamp(0.5 - phi / h, 0.0, 1.0);
}

}  // namespace stiffpme
