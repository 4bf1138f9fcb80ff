#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fraclab/field.hpp"
#include "fraclab/kantorovich.hpp"
#include "fraclab/report.hpp"

namespace fraclab {

enum class Experiment {
  kernel,
  caputo,
  kantorovich_rates,
  variance_scaling,
  voronovskaya,
  mollifier_rates,
  mse,
  burgers,
  dissipation,
  l2,
};

const std::vector<std::string>& experiment_names();
std::string experiment_name(Experiment e);
/// Throws ConfigError for unknown names.
Experiment parse_experiment(const std::string& name);

/// Invalid configuration; key() names the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  Experiment experiment = Experiment::kernel;
  // kernel
  double q = 1.0;
  double lambda = 1.0;
  int K = 40;
  // fractional
  double alpha = 0.5;
  double s = 0.75;
  double nu = 0.1;
  double sigma_f = 0.0;
  std::size_t steps = 0;  // 0: experiment default
  double t1 = 1.0;
  // grids
  std::vector<int> n_list;  // empty: experiment default
  int dim = 1;
  std::size_t points = 0;  // 0: experiment default
  double gamma = 0.0;
  // noise
  double sigma = 0.1;
  std::uint64_t seed = 42;
  std::optional<NoiseKind> kind;  // unset: the experiment's natural model
  std::size_t replicates = 1000;
  // output
  std::string out_dir;  // empty: nothing written
  bool svg = false;
  unsigned workers = 0;  // never affects results

  /// Range checks; throws ConfigError naming the key.
  void validate() const;
};

/// Builds a config from a flat JSON object. Keys: experiment, q, lambda, K,
/// alpha, s, nu, sigma_f, steps, t1, n_list, dim, points, gamma, sigma, seed,
/// kind ("cell_multiplier" | "white_noise"), replicates, out, svg, workers.
/// Unknown keys, wrong types and out-of-range values throw ConfigError.
RunConfig config_from_json(const nlohmann::json& j);

/// Reads an optional flat JSON file (empty path: none), then applies
/// `overrides` key by key, so flags win over the file.
RunConfig parse_config(const std::string& path, const nlohmann::json& overrides);
RunConfig parse_config_text(const std::string& text, const nlohmann::json& overrides = {});

nlohmann::ordered_json config_to_json(const RunConfig& config);

/// Runs the configured experiment with its built-in checks. When out_dir is
/// set, writes <experiment>.csv (plus <experiment>.svg with svg = true and
/// any experiment-specific snapshots) into it.
ExperimentReport run(const RunConfig& config);

/// Periodic 1D field |sin(w x)|^alpha with w = 2 pi / length.
Field abs_sine_power(std::size_t points, double length, double alpha);
/// Periodic Weierstrass-type field sum_{j=0}^{J} 2^{-j alpha} cos(2^j x) on
/// [0, 2 pi), with the largest J such that 2^J <= points / 4.
Field weierstrass_field(std::size_t points, double alpha);

}  // namespace fraclab
