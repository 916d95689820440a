#pragma once

#include <cmath>

namespace splithmc {

/// log(1 + exp(z)) without overflow for large |z|.
inline double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

/// 1 / (1 + exp(-z)), evaluated on the side that cannot overflow.
inline double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace splithmc
