#include <cstdio>
#include <string>

#include <gtest/gtest.h>

#include "crc/error.hpp"
#include "crc/ingest.hpp"
#include "support.hpp"

namespace crc {
namespace {

std::string table_text(std::size_t rows, bool constant_third = false) {
  std::string s = "date,a,b,c\n";
  for (std::size_t t = 0; t < rows; ++t) {
    char stamp[32];
    std::snprintf(stamp, sizeof stamp, "2021-01-01 %05zu", t);
    const double x = static_cast<double>(t);
    s += std::string(stamp) + "," + format_double(std::sin(0.1 * x)) + "," + format_double(std::cos(0.07 * x)) +
         "," + format_double(constant_third ? 3.0 : 0.001 * x) + "\n";
  }
  return s;
}

Shape shape(std::size_t P, std::size_t H) {
  Shape s;
  s.lookback = P;
  s.horizon = H;
  s.nodes = 3;
  return s;
}

TEST(Ingest, SplitSizesFollowRowArithmetic) {
  const CsvTable t = parse_csv(table_text(1000), "mem.csv");
  const DatasetSplit s = load_table(t, CsvDatasetSpec{}, shape(96, 24), {}, BaselineSpec{});
  // 700 / 150 / 150 rows, each losing P + H - 1 = 119 window starts.
  EXPECT_EQ(s.train.samples(), 700u - 119u);
  EXPECT_EQ(s.val.samples(), 150u - 119u);
  EXPECT_EQ(s.test.samples(), 150u - 119u);
  EXPECT_EQ(s.nodes(), 3u);
  EXPECT_EQ(s.node_names, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(s.train.base_forecast.dims(), s.train.target->dims());
}

TEST(Ingest, NormalizationUsesTrainingRowsOnly) {
  const CsvTable t = parse_csv(table_text(1000), "mem.csv");
  const DatasetSplit s = load_table(t, CsvDatasetSpec{}, shape(96, 24), {}, BaselineSpec{});
  const Matrix train = s.series.topRows(700);
  for (Eigen::Index c = 0; c < 3; ++c) {
    EXPECT_NEAR(train.col(c).mean(), 0.0, 1e-12);
    EXPECT_NEAR(std::sqrt(train.col(c).array().square().mean()), 1.0, 1e-9);
  }
  // Trend column keeps increasing beyond the training range.
  EXPECT_GT(s.series(999, 2), 1.7);
}

TEST(Ingest, ConstantColumnMapsToZerosWithFlooredScale) {
  const CsvTable t = parse_csv(table_text(600, true), "mem.csv");
  const DatasetSplit s = load_table(t, CsvDatasetSpec{}, shape(24, 6), {}, BaselineSpec::parse("persistence"));
  EXPECT_EQ(s.normalization.scale[2], kNormalizationStdFloor);
  EXPECT_EQ(s.series.col(2).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Ingest, NonMonotoneTimestampsRejected) {
  std::string text = table_text(300);
  text.replace(text.find("2021-01-01 00011"), 16, "2021-01-01 00009");
  const CsvTable t = parse_csv(text, "mem.csv");
  EXPECT_THROW(load_table(t, CsvDatasetSpec{}, shape(8, 2), {}, BaselineSpec{}), ParseError);
}

TEST(Ingest, BadCellsReportLocation) {
  std::string text = table_text(300);
  text.replace(text.find("\n2021-01-01 00004,") + 18, 1, "x");
  const CsvTable t = parse_csv(text, "mem.csv");
  try {
    load_table(t, CsvDatasetSpec{}, shape(8, 2), {}, BaselineSpec{});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 6"), std::string::npos) << e.what();
  }
}

TEST(Ingest, TooFewRowsRejected) {
  const CsvTable t = parse_csv(table_text(100), "mem.csv");
  EXPECT_THROW(load_table(t, CsvDatasetSpec{}, shape(96, 24), {}, BaselineSpec{}), InsufficientRows);
}

TEST(Ingest, SelectedColumnsOnly) {
  const CsvTable t = parse_csv(table_text(400), "mem.csv");
  CsvDatasetSpec spec;
  spec.value_columns = {"c", "a"};
  spec.normalization = NormalizationKind::none;
  const DatasetSplit s = load_table(t, spec, shape(8, 2), {}, BaselineSpec{});
  ASSERT_EQ(s.nodes(), 2u);
  EXPECT_NEAR(s.series(10, 0), 0.01, 1e-15);
  EXPECT_NEAR(s.series(10, 1), std::sin(1.0), 1e-15);
}

TEST(Csv, ForecastLayoutRoundTrip) {
  const Tensor3 f = testing::random_tensor(3, 4, 2, 8);
  const std::string text = forecast_csv(f);
  EXPECT_EQ(text.substr(0, text.find('\n')), "sample,horizon,node,value");
  EXPECT_EQ(parse_forecast_csv(text), f);
}

TEST(Csv, WhitespaceCrlfAndErrors) {
  const CsvTable t = parse_csv("x, y\r\n\n1 ,2\r\n");
  EXPECT_EQ(t.header[1], "y");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][0], "1");
  EXPECT_THROW(parse_csv("x,y\n1\n"), ParseError);
  EXPECT_THROW(parse_csv(""), ParseError);
  EXPECT_THROW(t.column("missing"), ParseError);
}

TEST(Csv, ForecastLayoutRejectsGapsAndDuplicates) {
  EXPECT_THROW(parse_forecast_csv("sample,horizon,node,value\n0,0,0,1\n0,0,0,2\n"), ParseError);
  EXPECT_THROW(parse_forecast_csv("sample,horizon,node,value\n0,0,0,1\n0,1,1,2\n"), ParseError);
}

}  // namespace
}  // namespace crc
