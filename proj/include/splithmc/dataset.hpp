#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "splithmc/math.hpp"
#include "splithmc/rng.hpp"
#include "splithmc/types.hpp"

namespace splithmc {

/// Per-column location/scale removed by standardize(); sd == 0 marks a
/// constant column that was passed through unscaled.
struct ColumnStats {
  double mean = 0.0;
  double sd = 1.0;
};

struct Dataset {
  Matrix x;                                // n x p covariates
  Vector y;                                // binary labels, entries 0 or 1
  std::vector<std::string> feature_names;  // length p
  std::string label_name = "y";
  std::vector<ColumnStats> standardization;  // empty until standardized

  Index n() const { return x.rows(); }
  Index p() const { return x.cols(); }
};

/// Case partition for the data-splitting integrator. inner_cases drive the
/// fine inner dynamics (and carry the prior); outer_cases get coarse kicks.
struct SplitPlan {
  std::vector<Index> inner_cases;  // R0
  std::vector<Index> outer_cases;  // R1
  double inner_fraction = 0.0;     // |R0| / n as requested
  int inner_steps = 1;             // leapfrog substeps per outer step
};

namespace detail {

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

inline bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace detail

/// Reads a comma-separated file with a header row. All columns except
/// `label_column` become covariates, in file order; the label must be 0 or 1.
inline Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file");
  if (line.size() >= 3 && line.compare(0, 3, "\xef\xbb\xbf") == 0) line.erase(0, 3);
  const auto header = detail::split_line(detail::strip_cr(line));

  Index label_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == label_column) {
      label_col = static_cast<Index>(j);
      break;
    }
  }
  if (label_col < 0) throw ParseError(path + ": no column named '" + label_column + "'");
  if (header.size() < 2) throw ParseError(path + ": no feature columns");

  Dataset ds;
  ds.label_name = label_column;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (static_cast<Index>(j) != label_col) ds.feature_names.push_back(header[j]);
  }

  std::vector<std::vector<double>> rows;
  std::vector<double> labels;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto cells = detail::split_line(line);
    if (cells.size() != header.size()) {
      throw ParseError(path + ": row " + std::to_string(lineno) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));
    }
    std::vector<double> row;
    row.reserve(header.size() - 1);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      double v = 0.0;
      if (!detail::parse_double(cells[j], v)) {
        throw ParseError(path + ": row " + std::to_string(lineno) + ", column " +
                         std::to_string(j + 1) + " ('" + header[j] + "'): cannot parse '" +
                         cells[j] + "'");
      }
      if (static_cast<Index>(j) == label_col) {
        if (v != 0.0 && v != 1.0) {
          throw InvalidLabelError(path + ": row " + std::to_string(lineno) +
                                  ": label must be 0 or 1, got '" + cells[j] + "'");
        }
        labels.push_back(v);
      } else {
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");

  const Index n = static_cast<Index>(rows.size());
  const Index p = static_cast<Index>(ds.feature_names.size());
  ds.x.resize(n, p);
  ds.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) ds.x(i, j) = rows[i][j];
    ds.y(i) = labels[i];
  }
  return ds;
}

/// Writes the same format load_csv reads (label column last, full precision).
inline void save_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  for (Index j = 0; j < ds.p(); ++j) out << ds.feature_names[j] << ',';
  out << ds.label_name << '\n';
  for (Index i = 0; i < ds.n(); ++i) {
    for (Index j = 0; j < ds.p(); ++j) out << ds.x(i, j) << ',';
    out << ds.y(i) << '\n';
  }
  if (!out) throw Error("write failed: " + path);
}

/// Rescales every covariate column to mean 0, sd 1 (divisor n-1). Constant
/// columns are passed through and recorded with sd = 0.
inline Dataset standardize(const Dataset& ds) {
  if (ds.n() < 2) throw std::invalid_argument("standardize: need at least 2 rows");
  Dataset out = ds;
  out.standardization.resize(static_cast<std::size_t>(ds.p()));
  for (Index j = 0; j < ds.p(); ++j) {
    const double mean = ds.x.col(j).mean();
    const double ss = (ds.x.col(j).array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(ds.n() - 1));
    if (sd == 0.0) {
      out.standardization[static_cast<std::size_t>(j)] = {mean, 0.0};
      continue;
    }
    out.x.col(j) = (ds.x.col(j).array() - mean) / sd;
    out.standardization[static_cast<std::size_t>(j)] = {mean, sd};
  }
  return out;
}

/// Covariate scale pattern used by the simulation experiments: sd 5 for the
/// first five columns, 1 for the next five, 0.2 for the rest.
inline std::vector<double> default_sd_schedule(Index p) {
  std::vector<double> sds(static_cast<std::size_t>(p), 0.2);
  for (Index j = 0; j < std::min<Index>(5, p); ++j) sds[static_cast<std::size_t>(j)] = 5.0;
  for (Index j = 5; j < std::min<Index>(10, p); ++j) sds[static_cast<std::size_t>(j)] = 1.0;
  return sds;
}

struct SimulatedData {
  Dataset data;
  Vector true_theta;  // (alpha, beta_1..beta_p) used to generate labels
};

/// Draws x_ij ~ N(0, sd_j^2), (alpha, beta) ~ N(0, 1), and labels
/// y_i ~ Bernoulli(logistic(alpha + x_i . beta)). Fully determined by seed:
/// covariates row-major first, then alpha, then beta, then labels.
inline SimulatedData simulate_logistic(Index n, Index p, const std::vector<double>& sd_schedule,
                                       std::uint64_t seed) {
  if (n < 1 || p < 1) throw std::invalid_argument("simulate_logistic: need n >= 1, p >= 1");
  if (static_cast<Index>(sd_schedule.size()) != p) {
    throw std::invalid_argument("simulate_logistic: sd_schedule length must equal p");
  }
  Rng rng(seed);
  SimulatedData sim;
  sim.data.x.resize(n, p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) {
      sim.data.x(i, j) = sd_schedule[static_cast<std::size_t>(j)] * rng.normal();
    }
  }
  sim.true_theta.resize(p + 1);
  for (Index k = 0; k < p + 1; ++k) sim.true_theta(k) = rng.normal();
  sim.data.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double z = sim.true_theta(0) + sim.data.x.row(i).dot(sim.true_theta.tail(p));
    sim.data.y(i) = rng.bernoulli(logistic(z)) ? 1.0 : 0.0;
  }
  sim.data.feature_names.resize(static_cast<std::size_t>(p));
  for (Index j = 0; j < p; ++j) {
    sim.data.feature_names[static_cast<std::size_t>(j)] = "x" + std::to_string(j + 1);
  }
  return sim;
}

/// Picks the ceil(fraction * n) cases whose fitted class-1 probability under
/// q_hat is closest to 1/2 (ties broken by lower index) as the inner subset.
inline SplitPlan boundary_split(const Dataset& ds, const Vector& q_hat, double fraction,
                                int inner_steps = 1) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("boundary_split: fraction must be in (0, 1)");
  }
  if (q_hat.size() != ds.p() + 1) {
    throw std::invalid_argument("boundary_split: q_hat length must be p + 1");
  }
  if (inner_steps < 1) throw std::invalid_argument("boundary_split: inner_steps must be >= 1");

  const Index n = ds.n();
  std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double z = q_hat(0) + ds.x.row(i).dot(q_hat.tail(ds.p()));
    dist[static_cast<std::size_t>(i)] = {std::abs(logistic(z) - 0.5), i};
  }
  std::sort(dist.begin(), dist.end());  // ties resolve to the lower index

  // exact ceiling, guarded against fraction*n landing just above an integer
  const Index k = static_cast<Index>(std::ceil(fraction * static_cast<double>(n) - 1e-9));

  SplitPlan plan;
  plan.inner_fraction = fraction;
  plan.inner_steps = inner_steps;
  plan.inner_cases.reserve(static_cast<std::size_t>(k));
  plan.outer_cases.reserve(static_cast<std::size_t>(n - k));
  for (Index i = 0; i < n; ++i) {
    auto& target = i < k ? plan.inner_cases : plan.outer_cases;
    target.push_back(dist[static_cast<std::size_t>(i)].second);
  }
  std::sort(plan.inner_cases.begin(), plan.inner_cases.end());
  std::sort(plan.outer_cases.begin(), plan.outer_cases.end());
  return plan;
}

}  // namespace splithmc
