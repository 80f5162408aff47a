#include <cstdlib>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "config.hpp"
#include "gin/errors.hpp"
#include "runner.hpp"

namespace {

// Flags shared by the subcommands; only flags the user actually passed become
// overrides, so file values survive unless overridden.
struct FlagSet {
  std::string config_path;
  std::string experiment;
  std::string ensemble;
  std::string out;
  std::string function;
  long n = 0;
  long trials = 0;
  long workers = -1;
  long steps = 0;
  long grid_points = 0;
  std::uint64_t seed = 0;
  double dt = 0.0, grid_lo = 0.0, grid_hi = 0.0;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "flat key=value config file");
    app->add_option("--experiment", experiment, "experiment name");
    app->add_option("--ensemble", ensemble, "matrix ensemble");
    app->add_option("--n", n, "matrix dimension");
    app->add_option("--trials", trials, "Monte Carlo trials");
    app->add_option("--seed", seed, "root seed (per-trial streams are derived)");
    app->add_option("--workers", workers, "worker threads (0 = hardware)");
    app->add_option("--out", out, "output directory");
    app->add_option("--dt", dt, "flow time step");
    app->add_option("--steps", steps, "flow steps");
    app->add_option("--function", function, "formulas: function name");
    app->add_option("--grid-lo", grid_lo, "formulas: grid start");
    app->add_option("--grid-hi", grid_hi, "formulas: grid end");
    app->add_option("--grid-points", grid_points, "formulas: grid size");
  }

  std::map<std::string, std::string> overrides(const CLI::App* app) const {
    std::map<std::string, std::string> o;
    const auto set_str = [&](const char* flag, const char* key, const std::string& v) {
      if (app->count(flag) > 0) o[key] = v;
    };
    const auto set_int = [&](const char* flag, const char* key, long long v) {
      if (app->count(flag) > 0) o[key] = std::to_string(v);
    };
    const auto set_dbl = [&](const char* flag, const char* key, double v) {
      if (app->count(flag) > 0) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        o[key] = buf;
      }
    };
    set_str("--experiment", "experiment", experiment);
    set_str("--ensemble", "ensemble", ensemble);
    set_int("--n", "n", n);
    set_int("--trials", "trials", trials);
    set_int("--seed", "seed", static_cast<long long>(seed));
    set_int("--workers", "workers", workers);
    set_str("--out", "out", out);
    set_dbl("--dt", "dt", dt);
    set_int("--steps", "steps", steps);
    set_str("--function", "function", function);
    set_dbl("--grid-lo", "grid_lo", grid_lo);
    set_dbl("--grid-hi", "grid_hi", grid_hi);
    set_int("--grid-points", "grid_points", grid_points);
    return o;
  }
};

int dispatch(const FlagSet& flags, const CLI::App* app,
             const std::string& forced_experiment) {
  auto overrides = flags.overrides(app);
  if (!forced_experiment.empty()) overrides["experiment"] = forced_experiment;
  try {
    const gin::cli::ExperimentConfig config =
        flags.config_path.empty()
            ? gin::cli::config_from_overrides(overrides)
            : gin::cli::parse_config(flags.config_path, overrides);
    return gin::cli::run(config);
  } catch (const gin::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return gin::cli::kExitConfigError;
  } catch (const gin::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gin::cli::kExitBackendFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  // Trial-level threads own the parallelism; keep the BLAS kernels serial.
  setenv("OPENBLAS_NUM_THREADS", "1", 0);

  CLI::App app{"ginover: eigenvector overlap statistics of non-normal random matrices"};
  app.require_subcommand(1);

  FlagSet run_flags, verify_flags, formulas_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "run a configured experiment");
  run_flags.attach(run_cmd);
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the independent oracle suite");
  verify_flags.attach(verify_cmd);
  CLI::App* formulas_cmd =
      app.add_subcommand("formulas", "tabulate a closed-form function to CSV");
  formulas_flags.attach(formulas_cmd);

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) return dispatch(run_flags, run_cmd, "");
  if (verify_cmd->parsed()) return dispatch(verify_flags, verify_cmd, "verify");
  if (formulas_cmd->parsed()) return dispatch(formulas_flags, formulas_cmd, "formulas");
  return gin::cli::kExitConfigError;
}
