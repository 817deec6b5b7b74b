#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace predrl::plot {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One parsed line of summary.csv.
struct SummaryRow {
  std::string agent;
  double delta{0.0};
  int s{1};
  int n{1};
  int runs{0};
  double mean_cost{0.0};
  double ci95{0.0};
  int park_count{0};
  int diverged_count{0};
};

/// Strict reader: exact header, nine fields per row, errors carry the line number.
std::vector<SummaryRow> read_summary_csv(std::istream& in);

struct LineSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> ci;  // half-widths
};

struct BarGroup {
  std::string name;          // legend entry
  std::vector<double> values;  // one per category
};

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<LineSeries>& series);

std::string bar_chart_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<std::string>& categories,
                          const std::vector<BarGroup>& groups);

struct SvgFile {
  std::string filename;
  std::string content;
};

/// Cost-with-CI and parking-count charts for every swept column (delta, s, N).
/// Empty input still yields both charts, annotated "no data".
std::vector<SvgFile> plot_summary(const std::vector<SummaryRow>& rows);

}  // namespace predrl::plot
