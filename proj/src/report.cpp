#include "fraclab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <utility>

#include "fraclab/stats.hpp"

namespace fraclab {
namespace {

std::string fmt_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Quotes a CSV field only when it needs it.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) {
    return s;
  }
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void ExperimentReport::add_row(std::string param, double n, std::string metric, double value,
                               double std_error) {
  rows.push_back(ReportRow{std::move(param), n, std::move(metric), value, std_error});
}

std::optional<SlopeFit> ExperimentReport::fit(const std::string& param, const std::string& metric) {
  std::vector<double> x, y;
  for (const ReportRow& r : rows) {
    if (r.param == param && r.metric == metric) {
      x.push_back(r.n);
      y.push_back(r.value);
    }
  }
  if (x.size() < 4) {
    return std::nullopt;
  }
  const SlopeEstimate est = fit_slope(x, y);
  SlopeFit out{param, metric, est.slope, est.half_width, est.points};
  slopes.push_back(out);
  return out;
}

void ExperimentReport::add_check(std::string name, bool ok, std::string detail) {
  checks.push_back(Check{std::move(name), ok, std::move(detail)});
}

std::optional<SlopeFit> ExperimentReport::fitted_slope(const std::string& param,
                                                       const std::string& metric) const {
  for (const SlopeFit& s : slopes) {
    if (s.param == param && s.metric == metric) {
      return s;
    }
  }
  return std::nullopt;
}

std::vector<double> ExperimentReport::values(const std::string& param,
                                             const std::string& metric) const {
  std::vector<double> out;
  for (const ReportRow& r : rows) {
    if (r.param == param && r.metric == metric) {
      out.push_back(r.value);
    }
  }
  return out;
}

bool ExperimentReport::passed() const {
  return !rows.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string report_to_csv(const ExperimentReport& report) {
  std::string out = "experiment,param,n,metric,value,stderr\n";
  const std::string exp = csv_field(report.experiment);
  for (const ReportRow& r : report.rows) {
    out += exp + ',' + csv_field(r.param) + ',' + fmt_number(r.n) + ',' + csv_field(r.metric) +
           ',' + fmt_number(r.value) + ',' + fmt_number(r.std_error) + '\n';
  }
  for (const SlopeFit& s : report.slopes) {
    out += exp + ',' + csv_field(s.param) + ",0," + csv_field("slope:" + s.metric) + ',' +
           fmt_number(s.slope) + ',' + fmt_number(s.half_width) + '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  os << text;
  if (!os) {
    throw std::runtime_error("failed writing " + path);
  }
}

std::string report_to_svg(const ExperimentReport& report) {
  using Series = std::vector<std::pair<double, double>>;
  std::vector<std::pair<std::pair<std::string, std::string>, Series>> series;
  std::map<std::pair<std::string, std::string>, std::size_t> slot;
  for (const ReportRow& r : report.rows) {
    if (!(r.n > 0.0) || !(r.value > 0.0) || !std::isfinite(r.value)) {
      continue;
    }
    const auto key = std::make_pair(r.param, r.metric);
    auto it = slot.find(key);
    if (it == slot.end()) {
      it = slot.emplace(key, series.size()).first;
      series.push_back({key, {}});
    }
    series[it->second].second.emplace_back(std::log10(r.n), std::log10(r.value));
  }

  constexpr double width = 720, height = 480, left = 70, right = 230, top = 40, bottom = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const auto& [key, pts] : series) {
    for (const auto& [x, y] : pts) {
      if (first) {
        x0 = x1 = x;
        y0 = y1 = y;
        first = false;
      }
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  x0 = std::floor(x0 * 2.0) / 2.0;
  x1 = std::max(std::ceil(x1 * 2.0) / 2.0, x0 + 0.5);
  y0 = std::floor(y0);
  y1 = std::max(std::ceil(y1), y0 + 1.0);
  const double pw = width - left - right, ph = height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
                    "font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt_short(left) + "\" y=\"24\" font-size=\"14\">" +
         xml_escape(report.experiment) + " (log10-log10)</text>\n";
  svg += "<rect x=\"" + fmt_short(left) + "\" y=\"" + fmt_short(top) + "\" width=\"" +
         fmt_short(pw) + "\" height=\"" + fmt_short(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (double t = x0; t <= x1 + 1e-9; t += 0.5) {
    svg += "<text x=\"" + fmt_short(px(t)) + "\" y=\"" + fmt_short(top + ph + 16) +
           "\" text-anchor=\"middle\">" + fmt_short(t) + "</text>\n";
  }
  const double ystep = std::max(1.0, std::ceil((y1 - y0) / 8.0));
  for (double t = y0; t <= y1 + 1e-9; t += ystep) {
    svg += "<text x=\"" + fmt_short(left - 6) + "\" y=\"" + fmt_short(py(t) + 4) +
           "\" text-anchor=\"end\">" + fmt_short(t) + "</text>\n";
  }
  svg += "<text x=\"" + fmt_short(left + pw / 2) + "\" y=\"" + fmt_short(height - 12) +
         "\" text-anchor=\"middle\">log10 n</text>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& [key, pts] = series[i];
    const char* color = palette[i % std::size(palette)];
    std::string path;
    for (const auto& [x, y] : pts) {
      path += fmt_short(px(x)) + ',' + fmt_short(py(y)) + ' ';
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + path + "\"/>\n";
    std::string label = key.second + (key.first.empty() ? "" : " [" + key.first + "]");
    if (const auto s = report.fitted_slope(key.first, key.second)) {
      label += " slope " + fmt_short(s->slope) + " +/- " + fmt_short(s->half_width);
    }
    const double ly = top + 14.0 * static_cast<double>(i) + 8;
    svg += "<line x1=\"" + fmt_short(left + pw + 10) + "\" y1=\"" + fmt_short(ly) + "\" x2=\"" +
           fmt_short(left + pw + 26) + "\" y2=\"" + fmt_short(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fmt_short(left + pw + 30) + "\" y=\"" + fmt_short(ly + 4) + "\">" +
           xml_escape(label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace fraclab
