#include "mirrorsim/csv.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace mirrorsim {

std::string csv_column(const std::string& name, const std::string& unit) {
  return unit.empty() ? name : name + " (" + unit + ")";
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    if (k) out << ',';
    out << quote(table.header[k]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      if (const auto* d = std::get_if<double>(&row[k])) {
        out << csv_number(*d);
      } else {
        out << quote(std::get<std::string>(row[k]));
      }
    }
    out << '\n';
  }
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream s;
  write_csv(s, table);
  return s.str();
}

}  // namespace mirrorsim
