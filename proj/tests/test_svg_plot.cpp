#include <sstream>

#include <gtest/gtest.h>

#include "predrl/experiments.hpp"
#include "predrl/svg_plot.hpp"
#include "test_util.hpp"

namespace predrl::plot {
namespace {

std::string horizon_summary() {
  std::ostringstream os;
  os << kSummaryHeader << '\n';
  int i = 0;
  for (const char* agent : {"MPC", "RQL", "SQL"})
    for (int n = 2; n <= 5; ++n, ++i)
      os << agent << ",0.1,1," << n << ",5," << 100.0 / n + i << "," << 3.5 << "," << n - 1 << ",0\n";
  return os.str();
}

std::vector<SummaryRow> parse(const std::string& text) {
  std::istringstream is(text);
  return read_summary_csv(is);
}

TEST(Plot, TwelveRowsGiveTwoCharts) {
  const auto rows = parse(horizon_summary());
  ASSERT_EQ(rows.size(), 12u);
  const auto files = plot_summary(rows);
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename, "cost_vs_N.svg");
  EXPECT_EQ(files[1].filename, "parking_vs_N.svg");
  for (const auto& f : files) {
    EXPECT_TRUE(predrl::testing::well_formed_xml(f.content)) << f.filename;
    EXPECT_NE(f.content.find("<svg"), std::string::npos);
    for (const char* a : {"MPC", "RQL", "SQL"}) EXPECT_NE(f.content.find(a), std::string::npos);
  }
  EXPECT_NE(files[0].content.find("<polygon"), std::string::npos);  // CI band
}

TEST(Plot, Deterministic) {
  const auto a = plot_summary(parse(horizon_summary()));
  const auto b = plot_summary(parse(horizon_summary()));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].content, b[i].content);
}

TEST(Plot, EmptyInputSaysNoData) {
  const auto files = plot_summary(parse(std::string(kSummaryHeader) + "\n"));
  ASSERT_EQ(files.size(), 2u);
  for (const auto& f : files) {
    EXPECT_NE(f.content.find("no data"), std::string::npos);
    EXPECT_TRUE(predrl::testing::well_formed_xml(f.content));
  }
}

TEST(Plot, MalformedCsvNamesTheLine) {
  auto text = horizon_summary();
  text += "MPC,0.1,1\n";
  try {
    parse(text);
    FAIL() << "expected CsvError";
  } catch (const CsvError& e) {
    EXPECT_NE(std::string(e.what()).find("line 14"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse("agent,delta\n"), CsvError);
  EXPECT_THROW(parse(std::string(kSummaryHeader) + "\nMPC,x,1,2,5,1,1,1,0\n"), CsvError);
}

TEST(Plot, SweptDeltaUsesDeltaAxis) {
  std::ostringstream os;
  os << kSummaryHeader << '\n' << "MPC,0.1,1,3,5,10,1,5,0\nMPC,0.2,1,3,5,12,1,4,0\n";
  const auto files = plot_summary(parse(os.str()));
  ASSERT_FALSE(files.empty());
  EXPECT_EQ(files[0].filename, "cost_vs_delta.svg");
}

}  // namespace
}  // namespace predrl::plot
