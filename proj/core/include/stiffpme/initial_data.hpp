#pragma once

#include <vector>

#include "stiffpme/grid.hpp"

namespace stiffpme {

struct DiskPatch {
    Vec2 center;
    double radius = 0.0;
};

struct BoxPatch {
    Vec2 lo;
    Vec2 hi;
};

/// amplitude * cos^2(pi r / (2 radius)) for r < radius, zero outside.
struct Bump {
    Vec2 center;
    double radius = 0.0;
    double amplitude = 0.0;

    double operator()(Vec2 x) const;
};

/// Grid-level regular data: the congested set Omega^0 and an exterior density below one.
struct InitialData {
    Mask omega0;
    ScalarField rhoE0;

    /// max(chi_{omega0}, rhoE0), the m-independent initial density.
    ScalarField compose() const;

    /// Throws InvalidInput if rhoE0 is negative, reaches 1 - 1e-6 outside omega0, or if the
    /// support of the composed density sits within `margin` cells of the boundary.
    void validate(int margin = 4) const;
};

/// Analytic description of regular data: union of patches plus exterior bumps.
struct RegularData {
    std::vector<DiskPatch> disks;
    std::vector<BoxPatch> boxes;
    std::vector<Bump> bumps;
    /// Spatially constant exterior density. Not compactly supported, so only the
    /// Hele-Shaw solver accepts it.
    double uniform_exterior = 0.0;

    bool has_patch() const { return !disks.empty() || !boxes.empty(); }
    bool exterior_is_zero() const { return bumps.empty() && uniform_exterior == 0.0; }

    /// Signed distance to the patch union (negative inside); a large positive value without patches.
    double signed_distance(Vec2 x) const;
    bool in_patch(Vec2 x) const { return signed_distance(x) <= 0.0; }
    /// Exterior density at x: max over bumps, plus the uniform level.
    double exterior_density(Vec2 x) const;
    /// Largest distance from `from` to any point of the bump supports, or -1 with no bumps.
    double exterior_support_reach(Vec2 from) const;

    InitialData sample(const GridSpec& grid) const;
    ScalarField level_set(const GridSpec& grid) const;
};

}  // namespace stiffpme
