#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace splithmc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// MAP Hessian (or any matrix required to be SPD) failed the positivity check.
class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& msg, Vector last_iterate, double grad_norm)
      : Error(msg), last_iterate(std::move(last_iterate)), grad_norm(grad_norm) {}
  Vector last_iterate;
  double grad_norm;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidLabelError : public Error {
 public:
  using Error::Error;
};

class DegenerateSeriesError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace splithmc
