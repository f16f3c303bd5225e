#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace stirap {

/// CSV table with '#' header comments. Doubles print with 10 significant
/// digits so output is byte-stable.
class Table {
 public:
  using Cell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

  explicit Table(std::vector<std::string> columns);

  void comment(std::string line);
  /// Throws std::invalid_argument when the row width differs from the header.
  void add_row(std::vector<Cell> row);

  std::size_t rows() const { return rows_.size(); }
  std::string csv() const;

 private:
  std::vector<std::string> comments_;
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<OutputFile> files;
  nlohmann::json summary = nlohmann::json::object();
};

/// Writes every file and summary.json into `dir`, creating it if needed.
/// Returns the paths written.
std::vector<std::filesystem::path> write_report(const ExperimentReport& report, const std::filesystem::path& dir);

/// Replaces non-finite numbers with null so the JSON stays valid.
nlohmann::json finite_or_null(double value);

}  // namespace stirap
