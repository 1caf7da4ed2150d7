#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace pm {

/// Full-precision decimal form (17 significant digits, '.' separator);
/// re-importing reproduces the double bit-for-bit.
std::string fmt_full(double v);

/// Minimal CSV emitter: header row, UTF-8, full double precision.
class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& cells);

private:
  std::ofstream out_;
  std::size_t columns_ = 0;
};

}  // namespace pm
