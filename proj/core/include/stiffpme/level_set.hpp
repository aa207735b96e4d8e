#pragma once

#include "stiffpme/grid.hpp"

namespace stiffpme {

/// {phi <= 0}. Cells exactly on the zero level belong to the set.
Mask sublevel_mask(const ScalarField& phi);

/// Signed distance to the zero level set by fast sweeping.
///
/// Cells adjacent to a sign change are initialised from the linearly interpolated crossing
/// points along grid axes and held fixed; the rest solve |grad d| = 1 with Godunov upwinding over
/// 2^dim sweep orderings, `iterations` times. The sign of every cell is preserved, so the
/// sublevel mask is unchanged. Without any sign change phi is returned as is.
ScalarField reinitialize(const ScalarField& phi, int iterations = 2);

/// One Godunov upwind step of phi_t + V |grad phi| = 0 (first order, Neumann at the boundary).
ScalarField advect_normal(const ScalarField& phi, const ScalarField& speed, double dt);

/// grad(phi) / |grad(phi)| by central differences; zero vector where the gradient vanishes.
Vec2 level_set_normal(const ScalarField& phi, std::size_t idx);

/// Fractional volume of {phi <= 0} inside the cell, clamp(1/2 - phi / h, 0, 1).
double inside_fraction(double phi, double h);

}  // namespace stiffpme
