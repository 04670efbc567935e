#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sil/cli.hpp"

namespace sil::cli {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 64, kRight = 24, kTop = 24, kBottom = 48;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // polyline or segment ends
};

std::size_t column_index(const CsvTable& table, const std::string& name) {
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    if (table.columns[i] == name) return i;
  throw usage_error("plot: table lacks column '" + name + "'");
}

double to_double(const std::string& s) { return std::stod(s); }

std::string axis_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Chart {
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  std::string x_name, y_name;

  void fit(const std::vector<Series>& series) {
    bool first = true;
    for (const auto& s : series)
      for (const auto& [x, y] : s.points) {
        if (first) {
          x_min = x_max = x;
          y_min = y_max = y;
          first = false;
        }
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
      }
    if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
    if (y_max - y_min < 1e-12) y_max = y_min + 1.0;
    const double pad = 0.04 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;
  }

  double sx(double x) const {
    return kLeft + (x - x_min) / (x_max - x_min) * (kWidth - kLeft - kRight);
  }
  double sy(double y) const {
    return kHeight - kBottom -
           (y - y_min) / (y_max - y_min) * (kHeight - kTop - kBottom);
  }
};

void render(const std::vector<Series>& series, const Chart& chart,
            bool as_segments, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes + ticks
  out << "<g stroke=\"#333\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
      << kWidth - kRight << "\" y2=\"" << kHeight - kBottom << "\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kHeight - kBottom << "\"/>\n";
  out << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = chart.x_min + (chart.x_max - chart.x_min) * i / 4.0;
    const double fy = chart.y_min + (chart.y_max - chart.y_min) * i / 4.0;
    out << "<text x=\"" << chart.sx(fx) << "\" y=\"" << kHeight - kBottom + 16
        << "\" text-anchor=\"middle\">" << axis_label(fx) << "</text>\n";
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << chart.sy(fy) + 4
        << "\" text-anchor=\"end\">" << axis_label(fy) << "</text>\n";
  }
  out << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\""
      << kHeight - 8 << "\" text-anchor=\"middle\">" << chart.x_name
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
      << (kTop + kHeight - kBottom) / 2 << ")\">" << chart.y_name
      << "</text>\n</g>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % (sizeof kPalette / sizeof *kPalette)];
    if (as_segments) {
      for (std::size_t i = 0; i + 1 < series[s].points.size(); i += 2) {
        out << "<line x1=\"" << chart.sx(series[s].points[i].first) << "\" y1=\""
            << chart.sy(series[s].points[i].second) << "\" x2=\""
            << chart.sx(series[s].points[i + 1].first) << "\" y2=\""
            << chart.sy(series[s].points[i + 1].second) << "\" stroke=\""
            << color << "\" stroke-width=\"6\" stroke-linecap=\"round\"/>\n";
      }
    } else if (!series[s].points.empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : series[s].points)
        out << chart.sx(x) << "," << chart.sy(y) << " ";
      out << "\"/>\n";
    }
    if (!series[s].label.empty())
      out << "<text font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color
          << "\" x=\"" << kWidth - kRight - 6 << "\" y=\""
          << kTop + 14 * (static_cast<double>(s) + 1)
          << "\" text-anchor=\"end\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw input_error("failed while writing " + path);
}

std::vector<Series> line_series(const CsvTable& table, const std::string& x_col,
                                const std::string& y_col,
                                const std::vector<std::string>& group_cols) {
  const std::size_t xi = column_index(table, x_col);
  const std::size_t yi = column_index(table, y_col);
  std::vector<std::size_t> gi;
  for (const auto& g : group_cols) gi.push_back(column_index(table, g));

  std::map<std::string, Series> grouped;
  std::vector<std::string> order;
  for (const auto& row : table.rows) {
    std::string key;
    for (std::size_t i = 0; i < gi.size(); ++i)
      key += group_cols[i] + "=" + row[gi[i]] + (i + 1 < gi.size() ? " " : "");
    if (!grouped.count(key)) order.push_back(key);
    grouped[key].label = key;
    grouped[key].points.emplace_back(to_double(row[xi]), to_double(row[yi]));
  }
  std::vector<Series> series;
  for (const auto& key : order) series.push_back(std::move(grouped[key]));
  return series;
}

}  // namespace

PlotKind plot_kind_from_string(const std::string& name) {
  if (name == "utility-curve") return PlotKind::UtilityCurve;
  if (name == "welfare-curve") return PlotKind::WelfareCurve;
  if (name == "region-band") return PlotKind::RegionBand;
  if (name == "khat-curve") return PlotKind::KhatCurve;
  throw usage_error("unknown plot kind '" + name + "'");
}

void emit_plot(const CsvTable& table, PlotKind kind, const std::string& path) {
  std::vector<Series> series;
  Chart chart;
  bool as_segments = false;

  switch (kind) {
    case PlotKind::UtilityCurve:
      series = line_series(table, "k", "utility", {"theta", "r", "x0"});
      chart.x_name = "k";
      chart.y_name = "utility";
      break;
    case PlotKind::WelfareCurve: {
      const bool profile =
          std::find(table.columns.begin(), table.columns.end(), "theta") !=
          table.columns.end();
      if (profile) {
        series = line_series(table, "theta", "welfare", {"r"});
        chart.x_name = "theta";
        chart.y_name = "welfare";
      } else {
        const bool has_p =
            std::find(table.columns.begin(), table.columns.end(), "p") !=
            table.columns.end();
        series = line_series(table, "r", "theta_star",
                             has_p ? std::vector<std::string>{"p"}
                                   : std::vector<std::string>{});
        chart.x_name = "r";
        chart.y_name = "theta_star";
      }
      break;
    }
    case PlotKind::KhatCurve:
      series = line_series(table, "x0", "k_hat", {});
      chart.x_name = "x0";
      chart.y_name = "k_hat";
      break;
    case PlotKind::RegionBand: {
      as_segments = true;
      const std::size_t ti = column_index(table, "theta");
      const std::size_t ri = column_index(table, "r");
      const std::size_t pi = column_index(table, "p");
      const std::size_t li = column_index(table, "x_lower");
      const std::size_t ui = column_index(table, "x_upper");
      std::map<std::string, Series> grouped;
      std::vector<std::string> order;
      for (const auto& row : table.rows) {
        if (row[li].empty()) continue;
        const std::string key = "theta=" + row[ti] + " r=" + row[ri];
        if (!grouped.count(key)) order.push_back(key);
        grouped[key].label = key;
        grouped[key].points.emplace_back(to_double(row[li]), to_double(row[pi]));
        grouped[key].points.emplace_back(to_double(row[ui]), to_double(row[pi]));
      }
      for (const auto& key : order) series.push_back(std::move(grouped[key]));
      chart.x_name = "x0";
      chart.y_name = "p";
      break;
    }
  }

  chart.fit(series);
  render(series, chart, as_segments, path);
}

}  // namespace sil::cli
