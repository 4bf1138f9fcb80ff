// Command-line front end: one subcommand per experiment.
#include <cstdio>
#include <exception>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fraclab/experiment.hpp"
#include "fraclab/report.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> out, n_list, kind;
  std::optional<double> alpha, sigma, q, lambda, s, nu, sigma_f, t1, gamma;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates, steps, points;
  std::optional<int> dim, K;
  std::optional<unsigned> workers;
  bool svg = false;
};

void add_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "flat JSON config file");
  cmd->add_option("--out", f.out, "output directory (default fraclab_out)");
  cmd->add_flag("--svg", f.svg, "also write a log-log SVG plot");
  cmd->add_option("--seed", f.seed, "base seed (default 42)");
  cmd->add_option("--replicates", f.replicates, "Monte Carlo replicates (default 1000)");
  cmd->add_option("--n-list", f.n_list, "comma-separated resolutions, e.g. 8,16,32,64");
  cmd->add_option("--alpha", f.alpha, "fractional / Holder order in (0,1) (default 0.5)");
  cmd->add_option("--sigma", f.sigma, "noise intensity (default 0.1)");
  cmd->add_option("--q", f.q, "kernel deformation q (default 1)");
  cmd->add_option("--lambda", f.lambda, "kernel slope lambda (default 1)");
  cmd->add_option("--K", f.K, "lattice truncation radius (default 40)");
  cmd->add_option("--s", f.s, "dissipation exponent (default 0.75)");
  cmd->add_option("--nu", f.nu, "viscosity (default 0.1)");
  cmd->add_option("--sigma-f", f.sigma_f, "forcing intensity (default 0)");
  cmd->add_option("--steps", f.steps, "time steps");
  cmd->add_option("--t1", f.t1, "final time (default 1)");
  cmd->add_option("--points", f.points, "grid points per axis (power of two)");
  cmd->add_option("--dim", f.dim, "spatial dimension, 1 or 2");
  cmd->add_option("--gamma", f.gamma, "kernel scaling exponent gamma (default 0)");
  cmd->add_option("--kind", f.kind, "noise model: cell_multiplier or white_noise");
  cmd->add_option("--workers", f.workers, "worker threads (0 = all cores)");
}

template <typename T>
void put(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  if (v) {
    j[key] = *v;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fraclab: stochastic Kantorovich / mollifier / fractional calculus experiments"};
  app.require_subcommand(1);
  Flags flags;
  std::map<CLI::App*, std::string> names;
  for (const std::string& name : fraclab::experiment_names()) {
    CLI::App* cmd = app.add_subcommand(name, "run the " + name + " experiment");
    add_flags(cmd, flags);
    names[cmd] = name;
  }
  CLI11_PARSE(app, argc, argv);

  nlohmann::json overrides = nlohmann::json::object();
  overrides["experiment"] = names.at(app.get_subcommands().front());
  put(overrides, "out", flags.out);
  put(overrides, "n_list", flags.n_list);
  put(overrides, "kind", flags.kind);
  put(overrides, "alpha", flags.alpha);
  put(overrides, "sigma", flags.sigma);
  put(overrides, "q", flags.q);
  put(overrides, "lambda", flags.lambda);
  put(overrides, "s", flags.s);
  put(overrides, "nu", flags.nu);
  put(overrides, "sigma_f", flags.sigma_f);
  put(overrides, "t1", flags.t1);
  put(overrides, "gamma", flags.gamma);
  put(overrides, "seed", flags.seed);
  put(overrides, "replicates", flags.replicates);
  put(overrides, "steps", flags.steps);
  put(overrides, "points", flags.points);
  put(overrides, "dim", flags.dim);
  put(overrides, "K", flags.K);
  put(overrides, "workers", flags.workers);
  if (flags.svg) {
    overrides["svg"] = true;
  }

  try {
    fraclab::RunConfig config = fraclab::parse_config(flags.config, overrides);
    if (config.out_dir.empty()) {
      config.out_dir = "fraclab_out";
    }
    const fraclab::ExperimentReport report = fraclab::run(config);
    for (const fraclab::Check& c : report.checks) {
      std::printf("%s %s: %s\n", c.passed ? "ok  " : "FAIL", c.name.c_str(), c.detail.c_str());
    }
    for (const fraclab::SlopeFit& s : report.slopes) {
      std::printf("slope %s [%s] = %.4f +/- %.4f\n", s.metric.c_str(), s.param.c_str(), s.slope,
                  s.half_width);
    }
    std::printf("wrote %s/%s.csv (seed %llu)\n", config.out_dir.c_str(), report.experiment.c_str(),
                static_cast<unsigned long long>(config.seed));
    return report.passed() ? 0 : 1;
  } catch (const fraclab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
