#include "stirap/report.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace stirap {
namespace {

TEST(Table, FormatsCommentsHeaderAndCells) {
  Table t({"a", "b", "c", "d"});
  t.comment("units: ns");
  t.add_row({1.0 / 3.0, std::int64_t{-2}, std::uint64_t{18446744073709551615u}, std::string("x")});
  EXPECT_EQ(t.csv(), "# units: ns\na,b,c,d\n0.3333333333,-2,18446744073709551615,x\n");
  EXPECT_EQ(t.rows(), 1u);
}

TEST(Table, RowWidthChecked) {
  Table t({"a", "b"});
  EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
}

TEST(Report, NonFiniteBecomesNull) {
  EXPECT_TRUE(finite_or_null(std::numeric_limits<double>::quiet_NaN()).is_null());
  EXPECT_TRUE(finite_or_null(INFINITY).is_null());
  EXPECT_EQ(finite_or_null(2.5), 2.5);
}

TEST(Report, WritesFilesAndSummary) {
  const auto dir = std::filesystem::temp_directory_path() / "stirap_report_test";
  std::filesystem::remove_all(dir);
  ExperimentReport r;
  r.experiment = "demo";
  r.files.push_back({"x.csv", "a\n1\n"});
  r.summary["k"] = 1;
  const auto paths = write_report(r, dir);
  ASSERT_EQ(paths.size(), 2u);
  std::ifstream in(dir / "x.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "a");
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.json"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace stirap
