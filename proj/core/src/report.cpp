#include "stirap/report.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace stirap {

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::comment(std::string line) { comments_.push_back(std::move(line)); }

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw std::invalid_argument("row width does not match the table header");
  rows_.push_back(std::move(row));
}

namespace {

struct CellFormatter {
  std::string operator()(double v) const { return fmt::format("{:.10g}", v); }
  std::string operator()(std::int64_t v) const { return std::to_string(v); }
  std::string operator()(std::uint64_t v) const { return std::to_string(v); }
  std::string operator()(const std::string& v) const { return v; }
};

}  // namespace

std::string Table::csv() const {
  std::string out;
  for (const std::string& c : comments_) out += "# " + c + "\n";
  out += fmt::format("{}\n", fmt::join(columns_, ","));
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += std::visit(CellFormatter{}, row[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::filesystem::path> write_report(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  const auto write = [&](const std::string& name, const std::string& content) {
    const std::filesystem::path path = dir / name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path.string());
    written.push_back(path);
  };
  for (const OutputFile& f : report.files) write(f.name, f.content);
  write("summary.json", report.summary.dump(2) + "\n");
  return written;
}

nlohmann::json finite_or_null(double value) {
  if (std::isfinite(value)) return value;
  return nullptr;
}

}  // namespace stirap
