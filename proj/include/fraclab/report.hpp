#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace fraclab {

/// One CSV record: `param` labels the sweep setting (e.g. "alpha=0.5"), `n`
/// is the abscissa (lattice or kernel resolution, step count, or 0 for
/// scalar summaries).
struct ReportRow {
  std::string param;
  double n = 0.0;
  std::string metric;
  double value = 0.0;
  double std_error = 0.0;
};

struct SlopeFit {
  std::string param;
  std::string metric;
  double slope = 0.0;
  double half_width = 0.0;
  std::size_t points = 0;
};

/// Tolerance check evaluated by an experiment.
struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  std::vector<ReportRow> rows;
  std::vector<SlopeFit> slopes;
  std::vector<Check> checks;
  nlohmann::ordered_json config_echo = nlohmann::ordered_json::object();

  void add_row(std::string param, double n, std::string metric, double value,
               double std_error = 0.0);
  /// Fits log(value) against log(n) over rows matching (param, metric);
  /// records and returns the fit, or nothing when fewer than 4 rows qualify.
  std::optional<SlopeFit> fit(const std::string& param, const std::string& metric);
  void add_check(std::string name, bool passed, std::string detail);

  std::optional<SlopeFit> fitted_slope(const std::string& param,
                                       const std::string& metric) const;
  std::vector<double> values(const std::string& param, const std::string& metric) const;
  bool passed() const;
};

/// CSV with header `experiment,param,n,metric,value,stderr`; slope fits are
/// appended as metric `slope:<metric>` with n = 0 and the 95% half-width in
/// the stderr column. LF line endings, %.17g numbers.
std::string report_to_csv(const ExperimentReport& report);
void write_text_file(const std::string& path, const std::string& text);

/// Standalone log-log SVG: one polyline per (param, metric) series with
/// positive values, legend entries annotated with fitted slopes.
std::string report_to_svg(const ExperimentReport& report);

}  // namespace fraclab
