#pragma once

#include <cmath>
#include <string>

#include "splithmc/gaussian_flow.hpp"
#include "splithmc/model.hpp"
#include "splithmc/types.hpp"

namespace splithmc {

struct MapStats {
  int iterations = 0;
  double grad_norm = 0.0;
};

/// Newton-Raphson maximization of the log posterior. Damped: each step
/// solves H d = g via Cholesky and halves the step until the potential
/// decreases. The logistic potential with a proper prior is strictly convex,
/// so this converges from anywhere; init = 0 (the prior mode) is the usual
/// choice. Returns the mode together with the Hessian there and its
/// spectral decomposition.
inline GaussianApprox find_map(const PotentialTerm& term, const Vector& init, double tol = 1e-8,
                               int max_iter = 100, MapStats* stats = nullptr) {
  if (!term.has_prior()) throw std::invalid_argument("find_map: term must include the prior");
  if (!(tol > 0.0)) throw std::invalid_argument("find_map: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("find_map: max_iter must be >= 1");
  if (init.size() != term.dim()) throw std::invalid_argument("find_map: init length must be p + 1");

  constexpr int kMaxHalvings = 30;

  Vector theta = init;
  double u = potential(theta, term);
  Vector g = grad_potential(theta, term);

  for (int iter = 0; iter < max_iter; ++iter) {
    const double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm < tol) {
      if (stats) {
        stats->iterations = iter;
        stats->grad_norm = gnorm;
      }
      GaussianApprox approx;
      approx.mode = theta;
      approx.hessian = hessian_potential(theta, term);
      auto [eigvecs, eigvals] = symmetric_eigen(approx.hessian);
      approx.eigvecs = std::move(eigvecs);
      approx.eigvals = std::move(eigvals);
      return approx;
    }

    const Matrix h = hessian_potential(theta, term);
    Eigen::LLT<Matrix> llt(h);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefiniteError("find_map: Hessian factorization failed at iteration " +
                                     std::to_string(iter));
    }
    const Vector direction = llt.solve(g);

    double step = 1.0;
    bool decreased = false;
    for (int halving = 0; halving <= kMaxHalvings; ++halving) {
      const Vector trial = theta - step * direction;
      const double u_trial = potential(trial, term);
      if (u_trial < u) {
        theta = trial;
        u = u_trial;
        decreased = true;
        break;
      }
      step *= 0.5;
    }
    if (!decreased) {
      throw ConvergenceFailure("find_map: no decrease after " + std::to_string(kMaxHalvings) +
                                   " halvings",
                               theta, gnorm);
    }
    g = grad_potential(theta, term);
  }

  throw ConvergenceFailure(
      "find_map: gradient norm " + std::to_string(g.lpNorm<Eigen::Infinity>()) + " after " +
          std::to_string(max_iter) + " iterations (tol " + std::to_string(tol) + ")",
      theta, g.lpNorm<Eigen::Infinity>());
}

}  // namespace splithmc
