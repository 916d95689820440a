#pragma once

#include <cassert>
#include <cmath>
#include <concepts>
#include <limits>

#include "splithmc/gaussian_flow.hpp"
#include "splithmc/model.hpp"
#include "splithmc/rng.hpp"
#include "splithmc/types.hpp"

namespace splithmc {

/// Anything that can act as a sampling target: potential energy and its
/// gradient as functions of position.
template <typename M>
concept PotentialModel = requires(const M& m, const Vector& q) {
  { m.value(q) } -> std::convertible_to<double>;
  { m.grad(q) } -> std::convertible_to<Vector>;
};

struct TrajectoryConfig {
  double epsilon = 0.1;  // nominal stepsize
  int steps = 1;         // outer leapfrog steps (L)
  bool jitter = false;   // draw the stepsize from Uniform(0.8 eps, eps) each iteration
};

struct ChainState {
  Vector q;
  double cached_u;  // potential at q, maintained by the kernels
  Rng rng;
};

template <PotentialModel M>
ChainState make_chain(const Vector& q0, const M& model, std::uint64_t seed) {
  return ChainState{q0, model.value(q0), Rng(seed)};
}

struct IterationResult {
  bool accepted = false;
  double delta_h = 0.0;  // H(proposal) - H(current), +inf on divergence
  bool divergent = false;
};

inline double kinetic_energy(const Vector& p) { return 0.5 * p.squaredNorm(); }

/// Stepsize for one iteration: eps, or Uniform(0.8 eps, eps) when jittered.
inline double draw_stepsize(double epsilon, bool jitter, Rng& rng) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("draw_stepsize: epsilon must be positive");
  return jitter ? rng.uniform(0.8 * epsilon, epsilon) : epsilon;
}

/// Accepts with probability min(1, exp(h_old - h_new)); a non-finite
/// proposal energy always rejects.
inline bool metropolis_accept(double h_old, double h_new, Rng& rng) {
  if (!std::isfinite(h_new)) return false;
  const double dh = h_new - h_old;
  if (dh <= 0.0) return true;
  return rng.uniform() < std::exp(-dh);
}

/// One leapfrog step: half kick, drift, half kick (unit mass, dq/dt = p).
/// Returns false and leaves the state mid-trajectory if a gradient goes
/// non-finite (the caller abandons the trajectory).
template <typename GradFn>
bool leapfrog_step(PhaseState& s, double epsilon, GradFn&& grad) {
  Vector g = grad(s.q);
  if (!g.allFinite()) return false;
  s.p -= 0.5 * epsilon * g;
  s.q += epsilon * s.p;
  g = grad(s.q);
  if (!g.allFinite()) return false;
  s.p -= 0.5 * epsilon * g;
  return true;
}

/// n leapfrog steps reusing the gradient across step boundaries; step k is
/// arithmetically identical to leapfrog_step, with one gradient evaluation
/// per step after the first.
template <typename GradFn>
bool leapfrog(PhaseState& s, double epsilon, int n_steps, GradFn&& grad) {
  Vector g = grad(s.q);
  if (!g.allFinite()) return false;
  for (int step = 0; step < n_steps; ++step) {
    s.p -= 0.5 * epsilon * g;
    s.q += epsilon * s.p;
    g = grad(s.q);
    if (!g.allFinite()) return false;
    s.p -= 0.5 * epsilon * g;
  }
  return s.q.allFinite() && s.p.allFinite();
}

/// Outer steps of the partial-analytic split: half kick with the residual
/// gradient, exact quadratic flow for epsilon, half kick. The flow operator
/// must have been built with duration epsilon.
template <typename ResidGradFn>
bool split_normal_trajectory(PhaseState& s, double epsilon, int n_steps, const FlowOperator& flow,
                             ResidGradFn&& residual_grad_fn) {
  Vector g = residual_grad_fn(s.q);
  if (!g.allFinite()) return false;
  for (int step = 0; step < n_steps; ++step) {
    s.p -= 0.5 * epsilon * g;
    flow.advance(s);
    g = residual_grad_fn(s.q);
    if (!g.allFinite()) return false;
    s.p -= 0.5 * epsilon * g;
  }
  return s.q.allFinite() && s.p.allFinite();
}

/// Nested leapfrog of the data split: per outer step, half kick with the
/// outer-term gradient at epsilon/2, then inner_steps plain leapfrog steps
/// of size epsilon/inner_steps on the inner term, then the closing half
/// kick. With no outer cases and inner_steps = 1 this reduces to leapfrog()
/// on the inner term.
template <typename InnerGradFn, typename OuterGradFn>
bool split_data_trajectory(PhaseState& s, double epsilon, int n_steps, int inner_steps,
                           InnerGradFn&& inner_grad, OuterGradFn&& outer_grad) {
  Vector g1 = outer_grad(s.q);
  if (!g1.allFinite()) return false;
  Vector g0 = inner_grad(s.q);
  if (!g0.allFinite()) return false;
  const double h = epsilon / inner_steps;
  for (int step = 0; step < n_steps; ++step) {
    s.p -= 0.5 * epsilon * g1;
    for (int m = 0; m < inner_steps; ++m) {
      s.p -= 0.5 * h * g0;
      s.q += h * s.p;
      g0 = inner_grad(s.q);
      if (!g0.allFinite()) return false;
      s.p -= 0.5 * h * g0;
    }
    g1 = outer_grad(s.q);
    if (!g1.allFinite()) return false;
    s.p -= 0.5 * epsilon * g1;
  }
  return s.q.allFinite() && s.p.allFinite();
}

namespace detail {

inline void check_config(const TrajectoryConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
    throw std::invalid_argument("TrajectoryConfig: epsilon must be positive and finite");
  }
  if (cfg.steps < 1) throw std::invalid_argument("TrajectoryConfig: steps must be >= 1");
}

template <PotentialModel M>
void check_cached_u(const ChainState& state, const M& model) {
#ifndef NDEBUG
  const double u = model.value(state.q);
  assert(std::abs(state.cached_u - u) <= 1e-8 * std::max(1.0, std::abs(u)));
#else
  (void)state;
  (void)model;
#endif
}

inline Vector draw_momentum(Index dim, Rng& rng) {
  Vector p(dim);
  for (Index i = 0; i < dim; ++i) p(i) = rng.normal();
  return p;
}

/// Shared accept/reject epilogue. Momentum is not negated: the kinetic
/// energy is symmetric and the momentum is replaced next iteration.
template <PotentialModel M>
IterationResult finish_trajectory(ChainState& state, const M& model, const PhaseState& end,
                                  double h_old, bool trajectory_ok) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (!trajectory_ok) return {false, kInf, true};
  const double u_new = model.value(end.q);
  const double h_new = u_new + kinetic_energy(end.p);
  if (!std::isfinite(h_new)) return {false, kInf, true};
  const bool accepted = metropolis_accept(h_old, h_new, state.rng);
  if (accepted) {
    state.q = end.q;
    state.cached_u = u_new;
  }
  return {accepted, h_new - h_old, false};
}

}  // namespace detail

/// Standard HMC: fresh Gaussian momentum, L leapfrog steps with the full
/// gradient, Metropolis acceptance on the exact Hamiltonian.
template <PotentialModel M>
IterationResult hmc_iteration(ChainState& state, const TrajectoryConfig& cfg, const M& model) {
  detail::check_config(cfg);
  detail::check_cached_u(state, model);
  PhaseState ps{state.q, detail::draw_momentum(state.q.size(), state.rng)};
  const double h_old = state.cached_u + kinetic_energy(ps.p);
  const double eps = draw_stepsize(cfg.epsilon, cfg.jitter, state.rng);
  const bool ok = leapfrog(ps, eps, cfg.steps, [&](const Vector& q) { return model.grad(q); });
  return detail::finish_trajectory(state, model, ps, h_old, ok);
}

/// Split HMC with the Gaussian fit handled analytically. Only the residual
/// gradient is evaluated numerically; acceptance uses the exact potential,
/// so the approximation never biases the equilibrium distribution.
template <PotentialModel M>
IterationResult split_normal_iteration(ChainState& state, const TrajectoryConfig& cfg,
                                       const M& model, const GaussianApprox& approx,
                                       FlowCache& flows) {
  detail::check_config(cfg);
  detail::check_cached_u(state, model);
  if (state.q.size() != approx.dim()) {
    throw std::invalid_argument("split_normal_iteration: approx dimension mismatch");
  }
  PhaseState ps{state.q, detail::draw_momentum(state.q.size(), state.rng)};
  const double h_old = state.cached_u + kinetic_energy(ps.p);
  const double eps = draw_stepsize(cfg.epsilon, cfg.jitter, state.rng);
  const FlowOperator& flow = flows.at(eps);
  const bool ok = split_normal_trajectory(
      ps, eps, cfg.steps, flow, [&](const Vector& q) { return residual_grad(q, model, approx); });
  return detail::finish_trajectory(state, model, ps, h_old, ok);
}

/// Split HMC with data splitting: inner model integrated finely, outer model
/// kicked coarsely, acceptance on the full model's exact potential.
template <PotentialModel M, PotentialModel Inner, PotentialModel Outer>
IterationResult split_data_iteration(ChainState& state, const TrajectoryConfig& cfg,
                                     const M& model, const Inner& inner, const Outer& outer,
                                     int inner_steps) {
  detail::check_config(cfg);
  detail::check_cached_u(state, model);
  if (inner_steps < 1) throw std::invalid_argument("split_data_iteration: inner_steps must be >= 1");
  PhaseState ps{state.q, detail::draw_momentum(state.q.size(), state.rng)};
  const double h_old = state.cached_u + kinetic_energy(ps.p);
  const double eps = draw_stepsize(cfg.epsilon, cfg.jitter, state.rng);
  const bool ok = split_data_trajectory(
      ps, eps, cfg.steps, inner_steps, [&](const Vector& q) { return inner.grad(q); },
      [&](const Vector& q) { return outer.grad(q); });
  return detail::finish_trajectory(state, model, ps, h_old, ok);
}

/// Random-walk Metropolis baseline: a block of isotropic Gaussian proposals.
/// Returns how many of the updates were accepted.
template <PotentialModel M>
int rwm_iteration(ChainState& state, const M& model, double proposal_sd, int updates) {
  if (!(proposal_sd > 0.0)) throw std::invalid_argument("rwm_iteration: proposal_sd must be positive");
  if (updates < 1) throw std::invalid_argument("rwm_iteration: updates must be >= 1");
  detail::check_cached_u(state, model);
  int accepted = 0;
  Vector proposal(state.q.size());
  for (int u = 0; u < updates; ++u) {
    for (Index i = 0; i < proposal.size(); ++i) {
      proposal(i) = state.q(i) + proposal_sd * state.rng.normal();
    }
    const double u_new = model.value(proposal);
    if (metropolis_accept(state.cached_u, u_new, state.rng)) {
      state.q = proposal;
      state.cached_u = u_new;
      ++accepted;
    }
  }
  return accepted;
}

}  // namespace splithmc
