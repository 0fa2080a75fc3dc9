#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace distctrl {

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

/// Writes one comma-separated row of doubles.
void write_csv_row(std::ostream& out, std::span<const double> row);

}  // namespace distctrl
