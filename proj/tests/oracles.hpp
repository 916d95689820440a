// Independent reference computations the tests check the library against:
// plain high-precision sums, finite differences, a generic RK4 integrator,
// and scalar root bisection. Nothing here calls into the code under test.
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "splithmc/dataset.hpp"
#include "splithmc/model.hpp"
#include "splithmc/types.hpp"

namespace oracles {

using splithmc::Index;
using splithmc::Matrix;
using splithmc::Vector;

/// Term-by-term logistic potential in long double, textbook formulas.
inline double naive_logistic_potential(const Vector& theta, const splithmc::Dataset& ds,
                                       const std::optional<splithmc::Prior>& prior,
                                       const std::vector<Index>* subset = nullptr) {
  long double u = 0.0L;
  const Index p = ds.p();
  if (prior) {
    u += static_cast<long double>(theta(0)) * theta(0) /
         (2.0L * prior->sigma_alpha * prior->sigma_alpha);
    for (Index j = 1; j <= p; ++j) {
      u += static_cast<long double>(theta(j)) * theta(j) /
           (2.0L * prior->sigma_beta * prior->sigma_beta);
    }
  }
  std::vector<Index> all;
  if (subset == nullptr) {
    for (Index i = 0; i < ds.n(); ++i) all.push_back(i);
    subset = &all;
  }
  for (Index i : *subset) {
    long double z = theta(0);
    for (Index j = 0; j < p; ++j) z += static_cast<long double>(ds.x(i, j)) * theta(j + 1);
    u -= static_cast<long double>(ds.y(i)) * z - std::log(1.0L + std::exp(z));
  }
  return static_cast<double>(u);
}

/// Central-difference gradient of a scalar function.
inline Vector fd_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                          double h = 1e-5) {
  Vector g(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    Vector hi = x, lo = x;
    hi(j) += h;
    lo(j) -= h;
    g(j) = (f(hi) - f(lo)) / (2.0 * h);
  }
  return g;
}

/// Central-difference Jacobian of a vector function (symmetrized when used
/// as a Hessian check).
inline Matrix fd_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x,
                          double h = 1e-5) {
  const Index m = f(x).size();
  Matrix jac(m, x.size());
  for (Index j = 0; j < x.size(); ++j) {
    Vector hi = x, lo = x;
    hi(j) += h;
    lo(j) -= h;
    jac.col(j) = (f(hi) - f(lo)) / (2.0 * h);
  }
  return jac;
}

struct Phase {
  Vector q;
  Vector p;
};

/// RK4 on Hamilton's equations dq/dt = p, dp/dt = -grad U(q).
inline Phase rk4_flow(Phase s, const std::function<Vector(const Vector&)>& grad_u, double t,
                      double dt) {
  const auto deriv = [&](const Phase& y) { return Phase{y.p, -grad_u(y.q)}; };
  const long steps = std::lround(t / dt);
  const double h = t / static_cast<double>(steps);
  for (long k = 0; k < steps; ++k) {
    const Phase k1 = deriv(s);
    const Phase k2 = deriv({s.q + 0.5 * h * k1.q, s.p + 0.5 * h * k1.p});
    const Phase k3 = deriv({s.q + 0.5 * h * k2.q, s.p + 0.5 * h * k2.p});
    const Phase k4 = deriv({s.q + h * k3.q, s.p + h * k3.p});
    s.q += h / 6.0 * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
    s.p += h / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
  }
  return s;
}

/// Root of a monotone function by bisection.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double tol = 1e-13) {
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if ((flo <= 0.0) == (fmid <= 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracles
