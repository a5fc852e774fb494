#include "sciforge/radar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

namespace sciforge::radar {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kSize = 520;
constexpr double kCx = 260.0, kCy = 260.0, kRadius = 190.0;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

std::string radar_svg(
    const std::vector<std::pair<std::string, std::vector<metrics::AggregateRow>>>&
        runs) {
  if (runs.empty()) throw std::invalid_argument("no runs to plot");

  // Axes: union of modalities across runs, alphabetical.
  std::set<std::string> axis_set;
  for (const auto& [label, rows] : runs) {
    if (rows.empty()) throw std::invalid_argument("empty score table");
    for (const auto& r : rows) axis_set.insert(r.modality);
  }
  const std::vector<std::string> axes(axis_set.begin(), axis_set.end());
  const size_t n = axes.size();

  // Mean f1_ctp per modality per run; absent modalities plot as 0.
  std::vector<std::vector<double>> values(runs.size(),
                                          std::vector<double>(n, 0.0));
  for (size_t ri = 0; ri < runs.size(); ++ri) {
    std::map<std::string, std::pair<double, int>> acc;
    for (const auto& row : runs[ri].second) {
      acc[row.modality].first += row.f1_ctp;
      acc[row.modality].second += 1;
    }
    for (size_t a = 0; a < n; ++a) {
      auto it = acc.find(axes[a]);
      if (it != acc.end())
        values[ri][a] = it->second.first / it->second.second;
    }
  }

  auto point = [&](size_t axis, double value) {
    double ang = 2.0 * kPi * axis / n - kPi / 2.0;
    double r = kRadius * std::clamp(value, 0.0, 100.0) / 100.0;
    return std::pair<double, double>{kCx + r * std::cos(ang),
                                     kCy + r * std::sin(ang)};
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(kSize) + "\" height=\"" + std::to_string(kSize) +
         "\" viewBox=\"0 0 " + std::to_string(kSize) + " " +
         std::to_string(kSize) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Grid rings at 25/50/75/100 and the axis spokes with labels.
  for (int ring = 1; ring <= 4; ++ring) {
    svg += "<polygon points=\"";
    for (size_t a = 0; a < n; ++a) {
      auto [x, y] = point(a, 25.0 * ring);
      svg += fmt(x) + "," + fmt(y) + " ";
    }
    svg += "\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
  }
  for (size_t a = 0; a < n; ++a) {
    auto [x, y] = point(a, 100.0);
    svg += "<line x1=\"" + fmt(kCx) + "\" y1=\"" + fmt(kCy) + "\" x2=\"" +
           fmt(x) + "\" y2=\"" + fmt(y) +
           "\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
    auto [lx, ly] = point(a, 112.0);
    svg += "<text x=\"" + fmt(lx) + "\" y=\"" + fmt(ly) +
           "\" font-size=\"12\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\">" + axes[a] + "</text>\n";
  }

  for (size_t ri = 0; ri < runs.size(); ++ri) {
    const char* color = kColors[ri % (sizeof(kColors) / sizeof(kColors[0]))];
    svg += "<polygon points=\"";
    for (size_t a = 0; a < n; ++a) {
      auto [x, y] = point(a, values[ri][a]);
      svg += fmt(x) + "," + fmt(y) + " ";
    }
    svg += std::string("\" fill=\"") + color + "\" fill-opacity=\"0.15\" " +
           "stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    // Legend entry.
    double ly = 20.0 + 18.0 * ri;
    svg += std::string("<rect x=\"10\" y=\"") + fmt(ly - 10) +
           "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    svg += "<text x=\"28\" y=\"" + fmt(ly) +
           "\" font-size=\"12\" font-family=\"sans-serif\">" +
           runs[ri].first + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

std::string radar_svg_from_csv(
    const std::vector<std::pair<std::string, std::string>>& csv_runs) {
  std::vector<std::pair<std::string, std::vector<metrics::AggregateRow>>> runs;
  for (const auto& [label, csv] : csv_runs)
    runs.emplace_back(label, metrics::scores_from_csv(csv));
  return radar_svg(runs);
}

}  // namespace sciforge::radar
