#include "stiffpme/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace stiffpme {

namespace {

constexpr double kFarDistance = 1e3;

double box_signed_distance(const BoxPatch& b, Vec2 x) {
    const Vec2 c = 0.5 * (b.lo + b.hi);
    const Vec2 half = 0.5 * (b.hi - b.lo);
    const Vec2 d{std::abs(x.x - c.x) - half.x, std::abs(x.y - c.y) - half.y};
    const Vec2 outside{std::max(d.x, 0.0), std::max(d.y, 0.0)};
    return norm(outside) + std::min(std::max(d.x, d.y), 0.0);
}

}  // namespace

double Bump::operator()(Vec2 x) const {
    const double r = distance(x, center);
    if (r >= radius) return 0.0;
    const double c = std::cos(0.5 * std::numbers::pi * r / radius);
    return amplitude * c * c;
}

ScalarField InitialData::compose() const {
    ScalarField out(rhoE0.grid(), 0.0, rhoE0.time());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = omega0[k] ? 1.0 : std::max(0.0, rhoE0[k]);
    return out;
}

void InitialData::validate(int margin) const {
    if (!(omega0.grid() == rhoE0.grid())) throw InvalidInput("InitialData: mask and exterior density grids differ");
    for (std::size_t k = 0; k < rhoE0.size(); ++k) {
        if (!(rhoE0[k] >= 0.0)) throw InvalidInput("InitialData: exterior density must be nonnegative");
        if (!omega0[k] && rhoE0[k] >= 1.0 - 1e-6) {
            throw InvalidInput("InitialData: exterior density must stay below 1 outside the congested set");
        }
    }
    if (support_margin(compose(), 0.0) < margin) {
        throw InvalidInput("InitialData: support within " + std::to_string(margin) + " cells of the boundary");
    }
}

double RegularData::signed_distance(Vec2 x) const {
    double d = kFarDistance;
    for (const auto& disk : disks) d = std::min(d, distance(x, disk.center) - disk.radius);
    for (const auto& box : boxes) d = std::min(d, box_signed_distance(box, x));
    return d;
}

double RegularData::exterior_density(Vec2 x) const {
    double v = 0.0;
    for (const auto& b : bumps) v = std::max(v, b(x));
    return std::min(1.0, v + uniform_exterior);
}

double RegularData::exterior_support_reach(Vec2 from) const {
    double reach = -1.0;
    for (const auto& b : bumps) reach = std::max(reach, distance(from, b.center) + b.radius);
    return reach;
}

InitialData RegularData::sample(const GridSpec& grid) const {
    InitialData data{Mask(grid), ScalarField(grid)};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Vec2 c = grid.center(k);
        data.omega0.set(k, in_patch(c));
        data.rhoE0[k] = exterior_density(c);
    }
    return data;
}

ScalarField RegularData::level_set(const GridSpec& grid) const {
    return ScalarField::sample(grid, [this](Vec2 x) { return signed_distance(x); });
}

}  // namespace stiffpme
