#include "config.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "gin/errors.hpp"

namespace gin::cli {
namespace {

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigInvalid("key '" + key + "': expected an integer, got '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigInvalid("key '" + key + "': expected a number, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const std::uint64_t x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigInvalid("key '" + key + "': expected an unsigned integer, got '" + v + "'");
  }
}

void apply_key(ExperimentConfig& c, const std::string& key, const std::string& value,
               bool& seed_set) {
  if (key == "experiment") c.experiment = experiment_from_string(value);
  else if (key == "ensemble") c.ensemble = ensemble_from_string(value);
  else if (key == "n") c.n = static_cast<int>(parse_long(key, value));
  else if (key == "trials") c.trials = parse_long(key, value);
  else if (key == "seed") { c.seed = parse_u64(key, value); seed_set = true; }
  else if (key == "workers") c.workers = static_cast<int>(parse_long(key, value));
  else if (key == "out") c.output_dir = value;
  else if (key == "window_center_re") c.window_center_re = parse_double(key, value);
  else if (key == "window_center_im") c.window_center_im = parse_double(key, value);
  else if (key == "window_c") c.window_c = parse_double(key, value);
  else if (key == "omega_lo") c.omega_lo = parse_double(key, value);
  else if (key == "omega_hi") c.omega_hi = parse_double(key, value);
  else if (key == "bulk_radius") c.bulk_radius = parse_double(key, value);
  else if (key == "ball_radius") c.ball_radius = parse_double(key, value);
  else if (key == "epsilon") c.epsilon = parse_double(key, value);
  else if (key == "dt") c.dt = parse_double(key, value);
  else if (key == "steps") c.steps = static_cast<int>(parse_long(key, value));
  else if (key == "msd_substeps") c.msd_substeps = static_cast<int>(parse_long(key, value));
  else if (key == "msd_time") c.msd_time = parse_double(key, value);
  else if (key == "eps_lower") c.eps_lower = parse_double(key, value);
  else if (key == "eps_upper") c.eps_upper = parse_double(key, value);
  else if (key == "function") c.function = value;
  else if (key == "grid_lo") c.grid_lo = parse_double(key, value);
  else if (key == "grid_hi") c.grid_hi = parse_double(key, value);
  else if (key == "grid_points") c.grid_points = static_cast<int>(parse_long(key, value));
  else if (key == "assert_ks") c.assert_ks = parse_double(key, value);
  else if (key == "assert_rel_err") c.assert_rel_err = parse_double(key, value);
  else if (key == "assert_ratio_lo") c.assert_ratio_lo = parse_double(key, value);
  else if (key == "assert_ratio_hi") c.assert_ratio_hi = parse_double(key, value);
  else throw ConfigInvalid("unknown key '" + key + "'");
}

void validate(ExperimentConfig& c, bool seed_set) {
  if (c.n < 1) throw ConfigInvalid("n must be >= 1");
  if (c.trials < 1) throw ConfigInvalid("trials must be >= 1");
  if (c.workers < 0) throw ConfigInvalid("workers must be >= 0");
  if (c.dt <= 0.0) throw ConfigInvalid("dt must be > 0");
  if (c.steps < 1) throw ConfigInvalid("steps must be >= 1");
  if (c.omega_hi <= c.omega_lo) throw ConfigInvalid("omega band must have omega_lo < omega_hi");
  if (c.grid_points < 1) throw ConfigInvalid("grid_points must be >= 1");
  if (c.epsilon <= 0.0) throw ConfigInvalid("epsilon must be > 0");
  if (!seed_set) {
    c.seed_from_entropy = true;
    std::random_device rd;
    c.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
}

}  // namespace

Experiment experiment_from_string(const std::string& s) {
  if (s == "diag-distribution") return Experiment::diag_distribution;
  if (s == "offdiag-mean") return Experiment::offdiag_mean;
  if (s == "second-moments") return Experiment::second_moments;
  if (s == "pseudospectrum") return Experiment::pseudospectrum;
  if (s == "dynamics") return Experiment::dynamics;
  if (s == "angles") return Experiment::angles;
  if (s == "extremes") return Experiment::extremes;
  if (s == "formulas") return Experiment::formulas;
  if (s == "verify") return Experiment::verify;
  if (s == "universality") return Experiment::universality;
  throw ConfigInvalid("unknown experiment '" + s + "'");
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::diag_distribution: return "diag-distribution";
    case Experiment::offdiag_mean: return "offdiag-mean";
    case Experiment::second_moments: return "second-moments";
    case Experiment::pseudospectrum: return "pseudospectrum";
    case Experiment::dynamics: return "dynamics";
    case Experiment::angles: return "angles";
    case Experiment::extremes: return "extremes";
    case Experiment::formulas: return "formulas";
    case Experiment::verify: return "verify";
    case Experiment::universality: return "universality";
  }
  return "?";
}

EnsembleKind ensemble_from_string(const std::string& s) {
  if (s == "complex_gaussian") return EnsembleKind::complex_gaussian;
  if (s == "complex_bernoulli") return EnsembleKind::complex_bernoulli;
  if (s == "complex_uniform_disk") return EnsembleKind::complex_uniform_disk;
  if (s == "real_gaussian") return EnsembleKind::real_gaussian;
  throw ConfigInvalid("unknown ensemble '" + s + "'");
}

std::string to_string(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::complex_gaussian: return "complex_gaussian";
    case EnsembleKind::complex_bernoulli: return "complex_bernoulli";
    case EnsembleKind::complex_uniform_disk: return "complex_uniform_disk";
    case EnsembleKind::real_gaussian: return "real_gaussian";
  }
  return "?";
}

int ExperimentConfig::resolved_workers() const {
  if (workers > 0) return workers;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

ExperimentConfig parse_config(const std::string& path,
                              const std::map<std::string, std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config file '" + path + "'");
  ExperimentConfig c;
  bool seed_set = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigInvalid("line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_key(c, key, value, seed_set);
    } catch (const ConfigInvalid& e) {
      throw ConfigInvalid("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  for (const auto& [key, value] : overrides) apply_key(c, key, value, seed_set);
  validate(c, seed_set);
  return c;
}

ExperimentConfig config_from_overrides(const std::map<std::string, std::string>& overrides) {
  ExperimentConfig c;
  bool seed_set = false;
  for (const auto& [key, value] : overrides) apply_key(c, key, value, seed_set);
  validate(c, seed_set);
  return c;
}

std::string config_to_text(const ExperimentConfig& c) {
  std::ostringstream o;
  o.precision(17);
  o << "experiment = " << to_string(c.experiment) << "\n";
  o << "ensemble = " << to_string(c.ensemble) << "\n";
  o << "n = " << c.n << "\n";
  o << "trials = " << c.trials << "\n";
  o << "seed = " << c.seed << "\n";
  o << "workers = " << c.workers << "\n";
  o << "out = " << c.output_dir << "\n";
  o << "window_center_re = " << c.window_center_re << "\n";
  o << "window_center_im = " << c.window_center_im << "\n";
  o << "window_c = " << c.window_c << "\n";
  o << "omega_lo = " << c.omega_lo << "\n";
  o << "omega_hi = " << c.omega_hi << "\n";
  o << "bulk_radius = " << c.bulk_radius << "\n";
  o << "ball_radius = " << c.ball_radius << "\n";
  o << "epsilon = " << c.epsilon << "\n";
  o << "dt = " << c.dt << "\n";
  o << "steps = " << c.steps << "\n";
  o << "msd_substeps = " << c.msd_substeps << "\n";
  o << "msd_time = " << c.msd_time << "\n";
  o << "eps_lower = " << c.eps_lower << "\n";
  o << "eps_upper = " << c.eps_upper << "\n";
  o << "function = " << c.function << "\n";
  o << "grid_lo = " << c.grid_lo << "\n";
  o << "grid_hi = " << c.grid_hi << "\n";
  o << "grid_points = " << c.grid_points << "\n";
  if (c.assert_ks) o << "assert_ks = " << *c.assert_ks << "\n";
  if (c.assert_rel_err) o << "assert_rel_err = " << *c.assert_rel_err << "\n";
  if (c.assert_ratio_lo) o << "assert_ratio_lo = " << *c.assert_ratio_lo << "\n";
  if (c.assert_ratio_hi) o << "assert_ratio_hi = " << *c.assert_ratio_hi << "\n";
  return o.str();
}

}  // namespace gin::cli
