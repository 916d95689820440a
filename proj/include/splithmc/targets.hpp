#pragma once

#include "splithmc/gaussian_flow.hpp"
#include "splithmc/model.hpp"
#include "splithmc/samplers.hpp"
#include "splithmc/types.hpp"

namespace splithmc {

/// Multivariate normal sampling target, parameterized by its precision:
/// U(q) = 1/2 (q - mean)^T precision (q - mean).
struct MvNormalModel {
  Vector mean;
  Matrix precision;

  static MvNormalModel from_covariance(Vector mean, const Matrix& covariance) {
    Eigen::LLT<Matrix> llt(covariance);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefiniteError("MvNormalModel: covariance is not positive definite");
    }
    const Index d = covariance.rows();
    return {std::move(mean), llt.solve(Matrix::Identity(d, d))};
  }

  double value(const Vector& q) const {
    const Vector d = q - mean;
    return 0.5 * d.dot(precision * d);
  }

  Vector grad(const Vector& q) const { return precision * (q - mean); }

  /// The exact Gaussian fit of this target (residual identically zero).
  GaussianApprox approx() const {
    GaussianApprox a;
    a.mode = mean;
    a.hessian = precision;
    auto [eigvecs, eigvals] = symmetric_eigen(precision);
    a.eigvecs = std::move(eigvecs);
    a.eigvals = std::move(eigvals);
    return a;
  }
};

/// The built-in correlated bivariate normal test target:
/// mean (3, 3), unit variances, correlation 0.95.
inline MvNormalModel bivariate_test_target() {
  Vector mean(2);
  mean << 3.0, 3.0;
  Matrix cov(2, 2);
  cov << 1.0, 0.95, 0.95, 1.0;
  return MvNormalModel::from_covariance(std::move(mean), cov);
}

/// A fixed fraction of another model's potential; lets any target be split
/// additively (U0 = c U, U1 = (1 - c) U) for the nested integrator.
template <PotentialModel M>
struct ScaledModel {
  const M* base;
  double factor;

  double value(const Vector& q) const { return factor * base->value(q); }
  Vector grad(const Vector& q) const { return factor * base->grad(q); }
};

}  // namespace splithmc
