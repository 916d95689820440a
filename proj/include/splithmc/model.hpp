#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "splithmc/dataset.hpp"
#include "splithmc/math.hpp"
#include "splithmc/types.hpp"

namespace splithmc {

/// Independent zero-mean normal priors: sd sigma_alpha for the intercept,
/// sigma_beta for every coefficient.
struct Prior {
  double sigma_alpha = 5.0;
  double sigma_beta = 5.0;

  Prior(double sa, double sb) : sigma_alpha(sa), sigma_beta(sb) {
    if (!(sa > 0.0) || !std::isfinite(sa) || !(sb > 0.0) || !std::isfinite(sb)) {
      throw std::invalid_argument("Prior: sds must be positive and finite");
    }
  }
};

/// One additive piece of the potential energy: a case subset of a dataset,
/// optionally with the prior attached. The factories are the only
/// constructors, so a prior can never be attached to more than one piece of
/// a split: it lives in the full posterior or in the inner (U0) term, never
/// in a bare data term.
class PotentialTerm {
 public:
  /// Full posterior energy: prior + all cases.
  static PotentialTerm posterior(const Dataset& data, const Prior& prior) {
    return PotentialTerm(data, prior, std::nullopt);
  }

  /// Data term only, all cases (the negative log likelihood).
  static PotentialTerm likelihood(const Dataset& data) {
    return PotentialTerm(data, std::nullopt, std::nullopt);
  }

  /// Inner term of a data split: prior + the given cases (U0).
  static PotentialTerm prior_subset(const Dataset& data, const Prior& prior,
                                    std::vector<Index> cases) {
    return PotentialTerm(data, prior, std::move(cases));
  }

  /// Outer term of a data split: the given cases, no prior (U1).
  static PotentialTerm data_subset(const Dataset& data, std::vector<Index> cases) {
    return PotentialTerm(data, std::nullopt, std::move(cases));
  }

  const Dataset& data() const { return *data_; }
  const std::optional<Prior>& prior() const { return prior_; }
  bool has_prior() const { return prior_.has_value(); }
  Index dim() const { return data_->p() + 1; }

  /// Covariates and labels of the cases this term covers.
  const Matrix& cases_x() const { return subset_ ? sub_x_ : data_->x; }
  const Vector& cases_y() const { return subset_ ? sub_y_ : data_->y; }
  Index case_count() const { return cases_y().size(); }

 private:
  PotentialTerm(const Dataset& data, std::optional<Prior> prior,
                std::optional<std::vector<Index>> cases)
      : data_(&data), prior_(prior), subset_(std::move(cases)) {
    if (subset_) {
      const Index n = data.n();
      for (Index i : *subset_) {
        if (i < 0 || i >= n) throw std::invalid_argument("PotentialTerm: case index out of range");
      }
      sub_x_.resize(static_cast<Index>(subset_->size()), data.p());
      sub_y_.resize(static_cast<Index>(subset_->size()));
      for (std::size_t k = 0; k < subset_->size(); ++k) {
        sub_x_.row(static_cast<Index>(k)) = data.x.row((*subset_)[k]);
        sub_y_(static_cast<Index>(k)) = data.y((*subset_)[k]);
      }
    }
  }

  const Dataset* data_;
  std::optional<Prior> prior_;
  std::optional<std::vector<Index>> subset_;
  Matrix sub_x_;  // extracted once so gradient sums stay dense matrix ops
  Vector sub_y_;
};

namespace detail {

inline void check_theta(const Vector& theta, const PotentialTerm& term, const char* where) {
  if (theta.size() != term.dim()) {
    throw std::invalid_argument(std::string(where) + ": theta length must be p + 1");
  }
  if (!theta.allFinite()) {
    throw std::invalid_argument(std::string(where) + ": theta must be finite");
  }
}

/// alpha + X beta for the term's cases.
inline Vector logits(const Vector& theta, const PotentialTerm& term) {
  const Index p = term.dim() - 1;
  Vector z = term.cases_x() * theta.tail(p);
  z.array() += theta(0);
  return z;
}

}  // namespace detail

/// Potential energy: prior quadratic (when present) minus the Bernoulli
/// log likelihood of the term's cases.
inline double potential(const Vector& theta, const PotentialTerm& term) {
  detail::check_theta(theta, term, "potential");
  double u = 0.0;
  if (term.has_prior()) {
    const Prior& pr = *term.prior();
    u += 0.5 * theta(0) * theta(0) / (pr.sigma_alpha * pr.sigma_alpha);
    u += 0.5 * theta.tail(term.dim() - 1).squaredNorm() / (pr.sigma_beta * pr.sigma_beta);
  }
  if (term.case_count() > 0) {
    const Vector z = detail::logits(theta, term);
    const Vector& y = term.cases_y();
    double data_term = 0.0;
    for (Index i = 0; i < z.size(); ++i) data_term += y(i) * z(i) - softplus(z(i));
    u -= data_term;
  }
  return u;
}

/// Gradient of potential(): prior shrinkage plus -sum_i x~_i (y_i - mu_i)
/// with mu_i the fitted class-1 probability and x~_i = (1, x_i).
inline Vector grad_potential(const Vector& theta, const PotentialTerm& term) {
  detail::check_theta(theta, term, "grad_potential");
  const Index p = term.dim() - 1;
  Vector g = Vector::Zero(term.dim());
  if (term.has_prior()) {
    const Prior& pr = *term.prior();
    g(0) = theta(0) / (pr.sigma_alpha * pr.sigma_alpha);
    g.tail(p) = theta.tail(p) / (pr.sigma_beta * pr.sigma_beta);
  }
  if (term.case_count() > 0) {
    Vector resid = detail::logits(theta, term);
    resid = term.cases_y() - resid.unaryExpr([](double z) { return logistic(z); });
    g(0) -= resid.sum();
    g.tail(p).noalias() -= term.cases_x().transpose() * resid;
  }
  return g;
}

/// Hessian of potential(): prior diagonal plus sum_i x~_i x~_i^T w_i with
/// w_i = mu_i (1 - mu_i). Exactly symmetric.
inline Matrix hessian_potential(const Vector& theta, const PotentialTerm& term) {
  detail::check_theta(theta, term, "hessian_potential");
  const Index d = term.dim();
  const Index p = d - 1;
  Matrix h = Matrix::Zero(d, d);
  if (term.case_count() > 0) {
    const Vector z = detail::logits(theta, term);
    Vector root_w(z.size());
    for (Index i = 0; i < z.size(); ++i) {
      const double mu = logistic(z(i));
      root_w(i) = std::sqrt(mu * (1.0 - mu));
    }
    Matrix scaled(z.size(), d);  // rows sqrt(w_i) * (1, x_i)
    scaled.col(0) = root_w;
    scaled.rightCols(p) = term.cases_x().array().colwise() * root_w.array();
    h.selfadjointView<Eigen::Lower>().rankUpdate(scaled.transpose());
    h.triangularView<Eigen::StrictlyUpper>() = h.transpose();
  }
  if (term.has_prior()) {
    const Prior& pr = *term.prior();
    h(0, 0) += 1.0 / (pr.sigma_alpha * pr.sigma_alpha);
    h.diagonal().tail(p).array() += 1.0 / (pr.sigma_beta * pr.sigma_beta);
  }
  return h;
}

/// Gaussian fit at the posterior mode: q_hat, the Hessian there, and its
/// spectral decomposition (eigvecs orthogonal, eigvals ascending, positive).
struct GaussianApprox {
  Vector mode;
  Matrix hessian;
  Matrix eigvecs;
  Vector eigvals;

  Index dim() const { return mode.size(); }
};

/// Gradient of the residual U1 = U - U0 when U0 is the Gaussian fit:
/// grad U(theta) - J(q_hat) (theta - q_hat). Model is anything exposing
/// grad(theta).
template <typename Model>
Vector residual_grad(const Vector& theta, const Model& full, const GaussianApprox& approx) {
  if (theta.size() != approx.dim()) {
    throw std::invalid_argument("residual_grad: dimension mismatch");
  }
  return full.grad(theta) - approx.hessian * (theta - approx.mode);
}

/// Adapter giving a PotentialTerm the value()/grad() shape the samplers use.
struct TermModel {
  PotentialTerm term;

  double value(const Vector& q) const { return potential(q, term); }
  Vector grad(const Vector& q) const { return grad_potential(q, term); }
};

inline Vector residual_grad(const Vector& theta, const PotentialTerm& full,
                            const GaussianApprox& approx) {
  return residual_grad(theta, TermModel{full}, approx);
}

}  // namespace splithmc
