#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "splithmc/diagnostics.hpp"
#include "splithmc/types.hpp"

namespace splithmc {

enum class DataSource { Csv, Simulate, Bivariate };

/// One chain to run. epsilon/steps/jitter drive the HMC variants;
/// inner_fraction/inner_steps apply to the data-splitting sampler only;
/// proposal_sd/updates to the random-walk baseline only.
struct SamplerSpec {
  SamplerKind kind = SamplerKind::Hmc;
  double epsilon = 0.1;
  int steps = 1;
  bool jitter = false;
  double inner_fraction = 0.0;
  int inner_steps = 1;
  double proposal_sd = 0.1;
  int updates = 1;

  const char* name() const { return sampler_kind_name(kind); }

  /// Nominal trajectory length (meaningless for RWM).
  double trajectory_length() const { return epsilon * steps; }
};

struct ExperimentConfig {
  DataSource source = DataSource::Simulate;
  std::string csv_path;
  std::string label_column = "y";
  Index sim_n = 0;
  Index sim_p = 0;
  std::vector<double> sd_schedule;  // empty: default schedule for sim_p
  bool standardize_data = true;
  double sigma_alpha = 5.0;
  double sigma_beta = 5.0;
  long iterations = 0;
  long burn_in = 0;
  std::uint64_t seed = 1;
  std::string output_path = "report.csv";
  bool include_intercept = false;  // count alpha^2 in the beta-sq series
  double map_tol = 1e-8;
  int map_max_iter = 100;
  std::vector<SamplerSpec> samplers;
};

/// Iterations below this leave too few batches for a meaningful
/// autocorrelation-time estimate.
inline constexpr long kMinIterations = 1000;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t");
  return s.substr(begin, end - begin + 1);
}

inline double config_double(const std::string& value, const std::string& key) {
  double out = 0.0;
  if (!parse_double(value, out)) {
    throw ConfigError("config: '" + key + "': cannot parse number '" + value + "'");
  }
  return out;
}

inline long config_long(const std::string& value, const std::string& key) {
  const double d = config_double(value, key);
  const long l = static_cast<long>(d);
  if (static_cast<double>(l) != d) {
    throw ConfigError("config: '" + key + "': expected an integer, got '" + value + "'");
  }
  return l;
}

inline bool config_bool(const std::string& value, const std::string& key) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError("config: '" + key + "': expected true or false, got '" + value + "'");
}

/// Schedule syntax: comma-separated items, each "SD" or "SDxCOUNT",
/// e.g. "5x5,1x5,0.2x20".
inline std::vector<double> parse_sd_schedule(const std::string& value) {
  std::vector<double> sds;
  std::istringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("config: sd_schedule: empty item");
    const auto xpos = item.find('x');
    std::string sd_text = item;
    long count = 1;
    if (xpos != std::string::npos) {
      sd_text = item.substr(0, xpos);
      count = config_long(item.substr(xpos + 1), "sd_schedule count");
      if (count < 1) throw ConfigError("config: sd_schedule: count must be >= 1");
    }
    const double sd = config_double(sd_text, "sd_schedule");
    if (!(sd > 0.0)) throw ConfigError("config: sd_schedule: sds must be positive");
    sds.insert(sds.end(), static_cast<std::size_t>(count), sd);
  }
  if (sds.empty()) throw ConfigError("config: sd_schedule: no items");
  return sds;
}

inline SamplerKind parse_sampler_kind(const std::string& word) {
  if (word == "hmc") return SamplerKind::Hmc;
  if (word == "split-normal") return SamplerKind::SplitNormal;
  if (word == "split-data") return SamplerKind::SplitData;
  if (word == "rwm") return SamplerKind::Rwm;
  throw ConfigError("config: unknown sampler kind '" + word + "'");
}

inline void apply_sampler_key(SamplerSpec& spec, const std::string& key,
                              const std::string& value) {
  if (key == "epsilon") {
    spec.epsilon = config_double(value, key);
  } else if (key == "L" || key == "steps") {
    spec.steps = static_cast<int>(config_long(value, key));
  } else if (key == "jitter") {
    spec.jitter = config_bool(value, key);
  } else if (key == "f" || key == "fraction") {
    spec.inner_fraction = config_double(value, key);
  } else if (key == "M" || key == "inner_steps") {
    spec.inner_steps = static_cast<int>(config_long(value, key));
  } else if (key == "proposal_sd") {
    spec.proposal_sd = config_double(value, key);
  } else if (key == "updates") {
    spec.updates = static_cast<int>(config_long(value, key));
  } else {
    throw ConfigError("config: unknown sampler key '" + key + "'");
  }
}

inline void apply_top_key(ExperimentConfig& cfg, const std::string& key,
                          const std::string& value) {
  if (key == "data") {
    if (value == "csv") {
      cfg.source = DataSource::Csv;
    } else if (value == "simulate") {
      cfg.source = DataSource::Simulate;
    } else if (value == "bivariate") {
      cfg.source = DataSource::Bivariate;
    } else {
      throw ConfigError("config: data must be csv, simulate, or bivariate");
    }
  } else if (key == "csv_path") {
    cfg.csv_path = value;
  } else if (key == "label_column") {
    cfg.label_column = value;
  } else if (key == "n") {
    cfg.sim_n = config_long(value, key);
  } else if (key == "p") {
    cfg.sim_p = config_long(value, key);
  } else if (key == "sd_schedule") {
    cfg.sd_schedule = parse_sd_schedule(value);
  } else if (key == "standardize") {
    cfg.standardize_data = config_bool(value, key);
  } else if (key == "sigma_alpha") {
    cfg.sigma_alpha = config_double(value, key);
  } else if (key == "sigma_beta") {
    cfg.sigma_beta = config_double(value, key);
  } else if (key == "iterations") {
    cfg.iterations = config_long(value, key);
  } else if (key == "burn_in") {
    cfg.burn_in = config_long(value, key);
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(config_long(value, key));
  } else if (key == "output") {
    cfg.output_path = value;
  } else if (key == "include_intercept") {
    cfg.include_intercept = config_bool(value, key);
  } else if (key == "map_tol") {
    cfg.map_tol = config_double(value, key);
  } else if (key == "map_max_iter") {
    cfg.map_max_iter = static_cast<int>(config_long(value, key));
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

}  // namespace detail

/// Parses the experiment grammar: `key = value` lines at top level plus
/// `sampler <kind> { ... }` blocks; '#' starts a comment.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  SamplerSpec current;
  bool in_block = false;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.rfind("sampler", 0) == 0) {
      if (in_block) throw ConfigError("config: line " + std::to_string(lineno) + ": nested sampler block");
      std::istringstream ss(line);
      std::string word, kind, brace;
      ss >> word >> kind >> brace;
      if (kind.empty() || brace != "{") {
        throw ConfigError("config: line " + std::to_string(lineno) +
                          ": expected 'sampler <kind> {'");
      }
      current = SamplerSpec{};
      current.kind = detail::parse_sampler_kind(kind);
      in_block = true;
      continue;
    }
    if (line == "}") {
      if (!in_block) throw ConfigError("config: line " + std::to_string(lineno) + ": stray '}'");
      cfg.samplers.push_back(current);
      in_block = false;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config: line " + std::to_string(lineno) + ": empty key or value");
    }
    if (in_block) {
      detail::apply_sampler_key(current, key, value);
    } else {
      detail::apply_top_key(cfg, key, value);
    }
  }
  if (in_block) throw ConfigError("config: unterminated sampler block");
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

/// Rejects invalid configurations before any data work happens.
inline void validate(const ExperimentConfig& cfg) {
  if (cfg.samplers.empty()) throw ConfigError("config: at least one sampler block is required");
  if (cfg.iterations < kMinIterations) {
    throw ConfigError("config: iterations must be >= " + std::to_string(kMinIterations) +
                      " for autocorrelation-time reporting");
  }
  if (cfg.burn_in < 0 || cfg.burn_in >= cfg.iterations) {
    throw ConfigError("config: burn_in must be in [0, iterations)");
  }
  if (cfg.source == DataSource::Csv && cfg.csv_path.empty()) {
    throw ConfigError("config: csv data source needs csv_path");
  }
  if (cfg.source == DataSource::Simulate) {
    if (cfg.sim_n < 2 || cfg.sim_p < 1) {
      throw ConfigError("config: simulation needs n >= 2 and p >= 1");
    }
    if (!cfg.sd_schedule.empty() &&
        static_cast<Index>(cfg.sd_schedule.size()) != cfg.sim_p) {
      throw ConfigError("config: sd_schedule length must equal p");
    }
  }
  if (!(cfg.sigma_alpha > 0.0) || !(cfg.sigma_beta > 0.0)) {
    throw ConfigError("config: prior sds must be positive");
  }
  if (!(cfg.map_tol > 0.0) || cfg.map_max_iter < 1) {
    throw ConfigError("config: map_tol must be positive, map_max_iter >= 1");
  }
  for (const SamplerSpec& s : cfg.samplers) {
    if (s.kind == SamplerKind::Rwm) {
      if (!(s.proposal_sd > 0.0) || s.updates < 1) {
        throw ConfigError("config: rwm needs proposal_sd > 0 and updates >= 1");
      }
      continue;
    }
    if (!(s.epsilon > 0.0) || !std::isfinite(s.epsilon) || s.steps < 1) {
      throw ConfigError(std::string("config: ") + s.name() +
                        " needs epsilon > 0 and L >= 1");
    }
    if (s.kind == SamplerKind::SplitData) {
      if (!(s.inner_fraction > 0.0 && s.inner_fraction < 1.0) || s.inner_steps < 1) {
        throw ConfigError("config: split-data needs f in (0, 1) and M >= 1");
      }
    }
  }
}

}  // namespace splithmc
