// Minimal CSV emit/read with bit-stable full-precision floats.

#pragma once

#include <string>
#include <vector>

namespace hylam::csv {

// Shortest round-trippable decimal representation (%.17g).
std::string format_double(double v);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  double num(size_t row, int col) const;
};

std::string emit(const Table& table);
Table parse(const std::string& text);
Table read_file(const std::string& path);
void write_file(const std::string& path, const Table& table);

}  // namespace hylam::csv
