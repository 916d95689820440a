#pragma once

#include <cmath>
#include <optional>
#include <utility>

#include "splithmc/model.hpp"
#include "splithmc/types.hpp"

namespace splithmc {

/// Position/momentum pair under the unit mass matrix.
struct PhaseState {
  Vector q;
  Vector p;
};

/// Spectral decomposition J = V diag(lambda) V^T of a symmetric positive
/// definite matrix; eigenvalues ascending. Throws invalid_argument if J is
/// not symmetric, NotPositiveDefiniteError if any eigenvalue falls at or
/// below 1e-12 * max(lambda) (a degenerate mode Hessian, not clamped).
inline std::pair<Matrix, Vector> symmetric_eigen(const Matrix& j) {
  if (j.rows() != j.cols() || j.rows() < 1) {
    throw std::invalid_argument("symmetric_eigen: matrix must be square, dim >= 1");
  }
  const double scale = std::max(1.0, j.cwiseAbs().maxCoeff());
  if ((j - j.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::invalid_argument("symmetric_eigen: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(j);
  if (solver.info() != Eigen::Success) {
    throw Error("symmetric_eigen: eigendecomposition failed");
  }
  Vector lambda = solver.eigenvalues();  // ascending
  const double floor = 1e-12 * std::max(lambda.maxCoeff(), 0.0);
  if (lambda(0) <= floor) {
    throw NotPositiveDefiniteError("symmetric_eigen: eigenvalue " + std::to_string(lambda(0)) +
                                   " at or below positivity floor");
  }
  return {solver.eigenvectors(), std::move(lambda)};
}

/// Exact flow of the quadratic Hamiltonian
///   H2 = 1/2 (q - q_hat)^T J (q - q_hat) + 1/2 p^T p
/// for a fixed duration. In coordinates rotated by the eigenvectors of J,
/// each mode k is an independent oscillator of frequency omega_k =
/// sqrt(lambda_k):
///   q_k(t) =  q_k cos(w t) + (p_k / w) sin(w t)
///   p_k(t) = -w q_k sin(w t) + p_k cos(w t)
/// The trig terms are fixed at construction, one operator per stepsize.
class FlowOperator {
 public:
  FlowOperator(const GaussianApprox& approx, double duration)
      : mode_(approx.mode), eigvecs_(approx.eigvecs), duration_(duration) {
    const Index d = approx.dim();
    omega_.resize(d);
    cosines_.resize(d);
    sines_.resize(d);
    for (Index k = 0; k < d; ++k) {
      const double w = std::sqrt(approx.eigvals(k));
      if (!(w > 0.0) || !std::isfinite(w)) {
        throw NotPositiveDefiniteError("FlowOperator: nonpositive mode frequency");
      }
      omega_(k) = w;
      cosines_(k) = std::cos(w * duration);
      sines_(k) = std::sin(w * duration);
    }
  }

  void advance(PhaseState& s) const {
    Vector qr = eigvecs_.transpose() * (s.q - mode_);
    Vector pr = eigvecs_.transpose() * s.p;
    for (Index k = 0; k < qr.size(); ++k) {
      const double a = qr(k);
      const double b = pr(k);
      qr(k) = a * cosines_(k) + b / omega_(k) * sines_(k);
      pr(k) = -omega_(k) * a * sines_(k) + b * cosines_(k);
    }
    s.q.noalias() = eigvecs_ * qr;
    s.q += mode_;
    s.p.noalias() = eigvecs_ * pr;
  }

  double duration() const { return duration_; }
  Index dim() const { return mode_.size(); }
  const Vector& frequencies() const { return omega_; }
  const Vector& cosines() const { return cosines_; }
  const Vector& sines() const { return sines_; }

 private:
  Vector mode_;
  Matrix eigvecs_;
  Vector omega_;
  Vector cosines_;
  Vector sines_;
  double duration_;
};

inline PhaseState exact_flow(const PhaseState& state, const FlowOperator& op) {
  if (state.q.size() != op.dim() || state.p.size() != op.dim()) {
    throw std::invalid_argument("exact_flow: state dimension mismatch");
  }
  PhaseState out = state;
  op.advance(out);
  return out;
}

/// One FlowOperator per stepsize: reused across iterations at a fixed
/// stepsize, rebuilt once per trajectory when the stepsize is jittered.
class FlowCache {
 public:
  explicit FlowCache(const GaussianApprox& approx) : approx_(&approx) {}

  const FlowOperator& at(double duration) {
    if (!op_ || op_->duration() != duration) op_.emplace(*approx_, duration);
    return *op_;
  }

 private:
  const GaussianApprox* approx_;
  std::optional<FlowOperator> op_;
};

}  // namespace splithmc
