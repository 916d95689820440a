#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "splithmc/dataset.hpp"
#include "splithmc/math.hpp"
#include "splithmc/types.hpp"

namespace splithmc {

struct ScalarSeries {
  std::vector<double> values;
  std::string name;
};

/// Batch-means autocorrelation time tau = B * var(batch means) / var(all):
/// batch size B = floor(N^(2/3)), complete batches only, trailing remainder
/// discarded, sample variances with divisor (count - 1). tau ~ 1 for an
/// independent series; roughly the number of iterations per effectively
/// independent sample otherwise.
inline double batch_act(const ScalarSeries& series) {
  const std::size_t n = series.values.size();
  if (n < 8) throw InsufficientDataError("batch_act: need at least 8 samples");

  const auto batch_size =
      static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(n) * n) + 1e-9));
  const std::size_t n_batches = n / batch_size;
  if (n_batches < 2) throw InsufficientDataError("batch_act: fewer than 2 complete batches");
  const std::size_t retained = n_batches * batch_size;

  double mean = 0.0;
  for (std::size_t i = 0; i < retained; ++i) mean += series.values[i];
  mean /= static_cast<double>(retained);

  double total_ss = 0.0;
  for (std::size_t i = 0; i < retained; ++i) {
    const double d = series.values[i] - mean;
    total_ss += d * d;
  }
  const double sample_var = total_ss / static_cast<double>(retained - 1);
  if (sample_var <= 0.0) {
    throw DegenerateSeriesError("batch_act: series '" + series.name + "' has zero variance");
  }

  double batch_ss = 0.0;
  for (std::size_t b = 0; b < n_batches; ++b) {
    double bm = 0.0;
    for (std::size_t i = b * batch_size; i < (b + 1) * batch_size; ++i) bm += series.values[i];
    bm /= static_cast<double>(batch_size);
    batch_ss += (bm - mean) * (bm - mean);
  }
  const double batch_var = batch_ss / static_cast<double>(n_batches - 1);

  return static_cast<double>(batch_size) * batch_var / sample_var;
}

struct DerivedSeries {
  ScalarSeries loglik;   // sum_i log P(y_i | x_i, theta), no prior
  ScalarSeries beta_sq;  // sum_j beta_j^2 (+ alpha^2 when requested)
};

/// Scalar summaries per retained sample; samples has one row per iteration,
/// columns (alpha, beta_1..beta_p).
inline DerivedSeries derived_series(const Matrix& samples, const Dataset& ds,
                                    bool include_intercept = false) {
  if (samples.cols() != ds.p() + 1) {
    throw std::invalid_argument("derived_series: sample columns must equal p + 1");
  }
  const Index p = ds.p();
  DerivedSeries out;
  out.loglik.name = "loglik";
  out.beta_sq.name = "beta_sq";
  out.loglik.values.reserve(static_cast<std::size_t>(samples.rows()));
  out.beta_sq.values.reserve(static_cast<std::size_t>(samples.rows()));
  for (Index t = 0; t < samples.rows(); ++t) {
    const Vector theta = samples.row(t).transpose();
    Vector z = ds.x * theta.tail(p);
    z.array() += theta(0);
    double ll = 0.0;
    for (Index i = 0; i < z.size(); ++i) ll += ds.y(i) * z(i) - softplus(z(i));
    double bsq = theta.tail(p).squaredNorm();
    if (include_intercept) bsq += theta(0) * theta(0);
    out.loglik.values.push_back(ll);
    out.beta_sq.values.push_back(bsq);
  }
  return out;
}

enum class SamplerKind { Hmc, SplitNormal, SplitData, Rwm };

inline const char* sampler_kind_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Hmc: return "hmc";
    case SamplerKind::SplitNormal: return "split-normal";
    case SamplerKind::SplitData: return "split-data";
    case SamplerKind::Rwm: return "rwm";
  }
  return "?";
}

/// Per-trajectory cost accounting. inner_fraction = 0 and inner_steps = 1
/// for anything but the data-splitting sampler.
struct CostModel {
  SamplerKind kind = SamplerKind::Hmc;
  int steps = 1;                  // L (Metropolis updates per iteration for RWM)
  double inner_fraction = 0.0;    // f
  int inner_steps = 1;            // M
  double seconds_per_iteration = 0.0;
};

/// Full-data-equivalent gradient evaluations per trajectory:
/// (f M + (1 - f)) L, which is plain L whenever f (M - 1) = 0.
inline double gradient_cost(const CostModel& cost) {
  if (cost.steps < 1) throw std::invalid_argument("gradient_cost: steps must be >= 1");
  if (cost.inner_steps < 1) throw std::invalid_argument("gradient_cost: inner_steps must be >= 1");
  if (cost.kind == SamplerKind::SplitData) {
    return (cost.inner_fraction * cost.inner_steps + (1.0 - cost.inner_fraction)) * cost.steps;
  }
  return static_cast<double>(cost.steps);
}

}  // namespace splithmc
