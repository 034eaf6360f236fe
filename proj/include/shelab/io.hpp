#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "shelab/density.hpp"
#include "shelab/geometry.hpp"

namespace shelab {

// 17 significant digits, enough for an exact round trip.
std::string format_real(double v);

// Plain-text formats. Blank lines and lines starting with '#' are skipped
// everywhere. Malformed input raises ValidationError with "source:line: ...".
//
//   grid density   header `nx ny nz h ox oy oz`, then nz*ny*nx values, x fastest
//   SPMA           one component per line: `cx cy cz a kind param...` where kind
//                  is quadratic|cosine (param c), taper (params c b) or
//                  table (param n, then n pairs s v)
//   point masses   one per line: `x y z m`
GridDensity read_grid_density(std::istream& in, const std::string& source = "<input>");
void write_grid_density(std::ostream& out, const GridDensity& g);

SPMA read_spma(std::istream& in, const std::string& source = "<input>");
void write_spma(std::ostream& out, const SPMA& spma);

std::vector<PointMass> read_point_masses(std::istream& in, const std::string& source = "<input>");
void write_point_masses(std::ostream& out, const std::vector<PointMass>& masses);

// File variants; an unreadable path raises ValidationError.
GridDensity load_grid_density(const std::string& path);
SPMA load_spma(const std::string& path);
std::vector<PointMass> load_point_masses(const std::string& path);

}  // namespace shelab
