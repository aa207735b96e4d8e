#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "stiffpme/grid.hpp"

namespace stiffpme {

// SPF1 layout: one ASCII header line
//   "SPF1 <dim> <nx> [<ny>] <h> <ox> [<oy>] <time>\n"
// followed by nx*ny little-endian IEEE-754 doubles in row-major order (i fastest).

void write_spf1(std::ostream& os, const ScalarField& field);
void write_spf1(const std::filesystem::path& path, const ScalarField& field);
ScalarField read_spf1(std::istream& is);
ScalarField read_spf1(const std::filesystem::path& path);

/// One line per cell: "x,value" in 1D, "x,y,value" in 2D, preceded by a header row.
void write_csv(std::ostream& os, const ScalarField& field);
void write_csv(const std::filesystem::path& path, const ScalarField& field);

}  // namespace stiffpme
