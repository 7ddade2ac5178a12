#pragma once

// Minimal CSV writer: "name (unit)" headers, ',' separator, LF endings,
// numbers printed with 9 significant digits.

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace mirrorsim {

using CsvCell = std::variant<double, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;
};

/// "name (unit)", or just "name" when unit is empty.
std::string csv_column(const std::string& name, const std::string& unit);

/// %.9g; NaN prints as "nan", infinities as "inf"/"-inf".
std::string csv_number(double v);

/// Strings containing separators, quotes or newlines are quoted.
void write_csv(std::ostream& out, const CsvTable& table);
std::string to_csv(const CsvTable& table);

}  // namespace mirrorsim
