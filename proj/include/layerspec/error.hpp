#pragma once

#include <stdexcept>
#include <string>

namespace layerspec {

enum class ErrorKind {
  invalid_input,
  domain,
  integration_failure,
  conjugate_point,
  invalid_surface,
  pole_singularity,
  no_limit,
  hypothesis_violation,
  truncation,
  evaluation,
  capability,
  degenerate_pairing,
  factorization,
  config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every exception thrown by the toolkit. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// ODE step-size underflow; carries the last abscissa reached with an accepted step.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, double last_good_s)
      : Error(ErrorKind::integration_failure, what), last_good_s_(last_good_s) {}
  double last_good_s() const noexcept { return last_good_s_; }

 private:
  double last_good_s_;
};

/// The Jacobi field vanished at s_star > 0; the polar chart is invalid beyond it.
class ConjugatePoint : public Error {
 public:
  ConjugatePoint(const std::string& what, double s_star)
      : Error(ErrorKind::conjugate_point, what), s_star_(s_star) {}
  double s_star() const noexcept { return s_star_; }

 private:
  double s_star_;
};

/// Meridian reconstruction produced r <= 0 at s_cross.
class InvalidSurface : public Error {
 public:
  InvalidSurface(const std::string& what, double s_cross)
      : Error(ErrorKind::invalid_surface, what), s_cross_(s_cross) {}
  double s_cross() const noexcept { return s_cross_; }

 private:
  double s_cross_;
};

}  // namespace layerspec
