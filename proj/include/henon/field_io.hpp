#pragma once

// Field CSV: header `r,theta,value`, one row per node in layout order
// (r-major). Values are written with 17 significant digits so a read after a
// write reproduces every double exactly.

#include <iosfwd>
#include <string>

#include "henon/grid.hpp"

namespace henon {

void write_field_csv(std::ostream& out, const Field& field);
void write_field_csv(const std::string& path, const Field& field);

/// Reads a field onto `grid`; throws ConfigError when the header, row count or
/// coordinates (to 1e-12) do not match.
Field read_field_csv(std::istream& in, const GridPtr& grid);
Field read_field_csv(const std::string& path, const GridPtr& grid);

/// Grid shape implied by a field CSV: number of distinct r and theta values.
struct CsvShape {
  int nr = 0;
  int ntheta = 0;
};
CsvShape probe_field_csv(const std::string& path);

}  // namespace henon
