#include "predrl/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace predrl::plot {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 80, kRight = 150, kTop = 50, kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* color(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

struct Scale {
  double lo, hi, px_lo, px_hi;
  double operator()(double v) const {
    if (hi == lo) return 0.5 * (px_lo + px_hi);
    return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo);
  }
};

// Round step so that about `count` ticks span [lo, hi].
std::vector<double> ticks(double lo, double hi, int count = 5) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / count;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return out;
}

std::string num(double v) { return fmt::format("{:.2f}", v); }
std::string label(double v) { return fmt::format("{:g}", v); }

std::string header(const std::string& title) {
  std::string s = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      kWidth, kHeight);
  s += fmt::format(
      "<text x=\"{}\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>\n",
      num((kLeft + kWidth - kRight) / 2), escape(title));
  return s;
}

std::string axes(const Scale& xs, const Scale& ys, const std::vector<double>& xticks,
                 const std::vector<std::string>& xtick_labels, const std::vector<double>& yticks,
                 const std::string& x_label, const std::string& y_label) {
  std::string s;
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", num(x0),
                   num(y0), num(x1), num(y0));
  s += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", num(x0),
                   num(y0), num(x0), num(y1));
  for (std::size_t i = 0; i < xticks.size(); ++i) {
    const double px = xs(xticks[i]);
    s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
                     num(px), num(y0), num(y0 + 5));
    s += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
        num(px), num(y0 + 18), escape(xtick_labels[i]));
  }
  for (double t : yticks) {
    const double py = ys(t);
    s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#dddddd\"/>\n",
                     num(x0), num(py), num(x1));
    s += fmt::format(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
        num(x0 - 6), num(py + 4), escape(label(t)));
  }
  s += fmt::format(
      "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
      num((x0 + x1) / 2), num(kHeight - 18), escape(x_label));
  s += fmt::format(
      "<text x=\"18\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" "
      "transform=\"rotate(-90 18 {0})\">{1}</text>\n",
      num((y0 + y1) / 2), escape(y_label));
  return s;
}

std::string legend(const std::vector<std::string>& names) {
  std::string s;
  const double x = kWidth - kRight + 15;
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = kTop + 10 + 20.0 * static_cast<double>(i);
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"14\" height=\"10\" fill=\"{}\"/>\n", num(x),
                     num(y - 9), color(i));
    s += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                     num(x + 20), num(y), escape(names[i]));
  }
  return s;
}

std::string no_data() {
  return fmt::format(
      "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"14\" fill=\"#888888\" "
      "text-anchor=\"middle\">no data</text>\n",
      num((kLeft + kWidth - kRight) / 2), num((kTop + kHeight - kBottom) / 2));
}

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<LineSeries>& series) {
  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo, ylo = 0.0, yhi = -xlo;
  bool any = false;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      any = true;
      xlo = std::min(xlo, s.x[i]);
      xhi = std::max(xhi, s.x[i]);
      const double ci = i < s.ci.size() ? s.ci[i] : 0.0;
      ylo = std::min(ylo, s.mean[i] - ci);
      yhi = std::max(yhi, s.mean[i] + ci);
    }
  }
  std::string out = header(title);
  if (!any) {
    const Scale xs{0, 1, kLeft, kWidth - kRight}, ys{0, 1, kHeight - kBottom, kTop};
    out += axes(xs, ys, {}, {}, {}, x_label, y_label) + no_data() + "</svg>\n";
    return out;
  }
  if (xhi == xlo) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  if (!(yhi > ylo)) yhi = ylo + 1.0;
  yhi += 0.05 * (yhi - ylo);
  const Scale xs{xlo, xhi, kLeft + 10, kWidth - kRight - 10};
  const Scale ys{ylo, yhi, kHeight - kBottom, kTop};

  std::set<double> xset;
  for (const auto& s : series) xset.insert(s.x.begin(), s.x.end());
  std::vector<double> xt(xset.begin(), xset.end());
  std::vector<std::string> xl;
  for (double v : xt) xl.push_back(label(v));
  out += axes(xs, ys, xt, xl, ticks(ylo, yhi), x_label, y_label);

  std::vector<std::string> names;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    names.push_back(s.name);
    if (s.x.empty()) continue;
    std::string band;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      band += fmt::format("{},{} ", num(xs(s.x[i])), num(ys(s.mean[i] + s.ci[i])));
    for (std::size_t i = s.x.size(); i-- > 0;)
      band += fmt::format("{},{} ", num(xs(s.x[i])), num(ys(s.mean[i] - s.ci[i])));
    out += fmt::format("<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n",
                       band, color(k));
    std::string line;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      line += fmt::format("{},{} ", num(xs(s.x[i])), num(ys(s.mean[i])));
    out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       line, color(k));
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\"/>\n", num(xs(s.x[i])),
                         num(ys(s.mean[i])), color(k));
    }
  }
  out += legend(names) + "</svg>\n";
  return out;
}

std::string bar_chart_svg(const std::string& title, const std::string& x_label,
                          const std::string& y_label, const std::vector<std::string>& categories,
                          const std::vector<BarGroup>& groups) {
  std::string out = header(title);
  double vmax = 0.0;
  for (const auto& g : groups)
    for (double v : g.values) vmax = std::max(vmax, v);
  if (categories.empty() || groups.empty()) {
    const Scale xs{0, 1, kLeft, kWidth - kRight}, ys{0, 1, kHeight - kBottom, kTop};
    out += axes(xs, ys, {}, {}, {}, x_label, y_label) + no_data() + "</svg>\n";
    return out;
  }
  const double yhi = vmax > 0.0 ? vmax * 1.05 : 1.0;
  const double n = static_cast<double>(categories.size());
  const Scale xs{0.0, n, kLeft, kWidth - kRight};
  const Scale ys{0.0, yhi, kHeight - kBottom, kTop};
  std::vector<double> centers;
  for (std::size_t c = 0; c < categories.size(); ++c) centers.push_back(static_cast<double>(c) + 0.5);
  out += axes(xs, ys, centers, categories, ticks(0.0, yhi), x_label, y_label);

  const double slot = (xs(1.0) - xs(0.0)) * 0.8;
  const double bar = slot / static_cast<double>(groups.size());
  std::vector<std::string> names;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    names.push_back(groups[g].name);
    for (std::size_t c = 0; c < categories.size() && c < groups[g].values.size(); ++c) {
      const double x = xs(static_cast<double>(c)) + 0.1 * (xs(1.0) - xs(0.0)) +
                       bar * static_cast<double>(g);
      const double top = ys(groups[g].values[c]);
      out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                         num(x), num(top), num(bar * 0.9), num(ys(0.0) - top), color(g));
    }
  }
  out += legend(names) + "</svg>\n";
  return out;
}

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  constexpr const char* header_line = "agent,delta,s,N,runs,mean_cost,ci95,park_count,diverged_count";
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw CsvError("line 1: missing header");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header_line) {
    throw CsvError(fmt::format("line 1: unexpected header '{}', expected '{}'", line, header_line));
  }
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 9) {
      throw CsvError(fmt::format("line {}: expected 9 fields, got {}", lineno, f.size()));
    }
    SummaryRow r;
    try {
      std::size_t pos = 0;
      auto to_d = [&](const std::string& s) {
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
      };
      auto to_i = [&](const std::string& s) {
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
      };
      r.agent = f[0];
      r.delta = to_d(f[1]);
      r.s = to_i(f[2]);
      r.n = to_i(f[3]);
      r.runs = to_i(f[4]);
      r.mean_cost = to_d(f[5]);
      r.ci95 = to_d(f[6]);
      r.park_count = to_i(f[7]);
      r.diverged_count = to_i(f[8]);
    } catch (const std::exception&) {
      throw CsvError(fmt::format("line {}: malformed number in '{}'", lineno, line));
    }
    if (r.agent.empty()) throw CsvError(fmt::format("line {}: empty agent name", lineno));
    if (r.runs < 0 || r.park_count < 0 || r.park_count > r.runs || r.ci95 < 0.0) {
      throw CsvError(fmt::format("line {}: counts or CI out of range", lineno));
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<SvgFile> plot_summary(const std::vector<SummaryRow>& rows) {
  struct Axis {
    const char* column;
    const char* label;
    double (*get)(const SummaryRow&);
  };
  const Axis all_axes[] = {
      {"delta", "sampling time delta [s]", [](const SummaryRow& r) { return r.delta; }},
      {"s", "prediction step multiplier s", [](const SummaryRow& r) { return double(r.s); }},
      {"N", "prediction horizon N", [](const SummaryRow& r) { return double(r.n); }},
  };

  std::vector<const Axis*> swept;
  for (const auto& ax : all_axes) {
    std::set<double> values;
    for (const auto& r : rows) values.insert(ax.get(r));
    if (values.size() > 1) swept.push_back(&ax);
  }
  if (swept.empty()) swept.push_back(&all_axes[2]);

  std::vector<SvgFile> files;
  for (const Axis* ax : swept) {
    // Series key: agent plus every other column that varies.
    std::map<std::string, std::vector<const SummaryRow*>> groups;
    std::vector<std::string> order;
    for (const auto& r : rows) {
      std::string key = r.agent;
      for (const Axis* other : swept)
        if (other != ax) key += fmt::format(" {}={}", other->column, other->get(r));
      if (!groups.count(key)) order.push_back(key);
      groups[key].push_back(&r);
    }

    std::vector<LineSeries> series;
    std::vector<BarGroup> bars;
    std::set<double> xs;
    for (const auto& r : rows) xs.insert(ax->get(r));
    std::vector<double> xv(xs.begin(), xs.end());
    std::vector<std::string> categories;
    for (double v : xv) categories.push_back(fmt::format("{:g}", v));

    for (const auto& key : order) {
      auto pts = groups[key];
      std::stable_sort(pts.begin(), pts.end(),
                       [&](auto* a, auto* b) { return ax->get(*a) < ax->get(*b); });
      LineSeries ls{key, {}, {}, {}};
      BarGroup bg{key, std::vector<double>(xv.size(), 0.0)};
      for (auto* p : pts) {
        ls.x.push_back(ax->get(*p));
        ls.mean.push_back(p->mean_cost);
        ls.ci.push_back(p->ci95);
        const auto idx = std::lower_bound(xv.begin(), xv.end(), ax->get(*p)) - xv.begin();
        bg.values[static_cast<std::size_t>(idx)] = p->park_count;
      }
      series.push_back(std::move(ls));
      bars.push_back(std::move(bg));
    }

    files.push_back({fmt::format("cost_vs_{}.svg", ax->column),
                     line_chart_svg(fmt::format("Accumulated stage cost vs {}", ax->column),
                                    ax->label, "accumulated stage cost (mean, 95% CI)", series)});
    files.push_back({fmt::format("parking_vs_{}.svg", ax->column),
                     bar_chart_svg(fmt::format("Successful parking count vs {}", ax->column),
                                   ax->label, "parked runs", categories, bars)});
  }
  return files;
}

}  // namespace predrl::plot
