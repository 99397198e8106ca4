#include "gradvar/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gradvar {

std::string format_csv_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv_atomic(const std::string& path, const std::vector<CsvRow>& rows) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) throw std::runtime_error("write_csv_atomic: cannot open " + tmp.string());
    f << kCsvHeader << "\n";
    for (const CsvRow& r : rows) {
      f << r.experiment << ',' << r.replication << ',' << r.iteration << ',' << r.metric_name
        << ',' << format_csv_value(r.value) << ',' << r.baseline << ',' << r.seed << "\n";
    }
    f.flush();
    if (!f) {
      f.close();
      fs::remove(tmp);
      throw std::runtime_error("write_csv_atomic: write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

std::vector<CsvRow> parse_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("parse_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error("parse_csv: empty file " + path);
  if (line != kCsvHeader)
    throw std::runtime_error("parse_csv: unexpected header '" + line + "'");
  std::vector<CsvRow> rows;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7)
      throw std::runtime_error("parse_csv: line " + std::to_string(lineno) + ": expected 7 fields");
    CsvRow r;
    r.experiment = fields[0];
    r.replication = std::stoi(fields[1]);
    r.iteration = std::stoi(fields[2]);
    r.metric_name = fields[3];
    r.value = std::stod(fields[4]);
    r.baseline = fields[5];
    r.seed = std::stoull(fields[6]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace gradvar
