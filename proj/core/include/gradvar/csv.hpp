#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gradvar {

/// Long-format result row: one metric per row, values printed with 17
/// significant digits so doubles round-trip exactly.
struct CsvRow {
  std::string experiment;
  int replication = 0;
  int iteration = 0;
  std::string metric_name;
  double value = 0.0;
  std::string baseline;
  std::uint64_t seed = 0;
};

inline constexpr const char* kCsvHeader =
    "experiment,replication,iteration,metric_name,value,baseline,seed";

std::string format_csv_value(double v);

/// Writes header + rows to `path` atomically (temp file in the same
/// directory, then rename); an interrupted run never leaves a partial file
/// at `path`.
void write_csv_atomic(const std::string& path, const std::vector<CsvRow>& rows);

/// Parses a file produced by write_csv_atomic. Round-trips exactly.
std::vector<CsvRow> parse_csv(const std::string& path);

}  // namespace gradvar
