#include "distctrl/io.hpp"

#include <charconv>
#include <ostream>

namespace distctrl {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv_row(std::ostream& out, std::span<const double> row) {
  for (size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << format_double(row[i]);
  }
  out << '\n';
}

}  // namespace distctrl
