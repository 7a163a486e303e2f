#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace collarkit {

/// Base of every error raised by the library. Inapplicable bounds are not
/// errors; they are reported through BoundReport::applicable.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Forcing of a Poisson problem has nonzero metric mean.
class NonZeroMean : public Error {
 public:
  NonZeroMean(double mean, double tolerance);
  double mean() const { return mean_; }

 private:
  double mean_;
};

/// Gauss curvature of a path metric is not positive at some node.
class CurvaturePositivityLost : public Error {
 public:
  CurvaturePositivityLost(double t, std::size_t node, double value);
  double t() const { return t_; }
  std::size_t node() const { return node_; }

 private:
  double t_;
  std::size_t node_;
};

/// Linear interpolation of the metric cannot be held in the band-limited
/// conformal representation to the required accuracy.
class NotRepresentable : public Error {
 public:
  NotRepresentable(double t, double residual);
};

class MassTooLarge : public Error {
 public:
  MassTooLarge(double m, double r_o);
};

/// A collar admissibility inequality fails. condition() names it.
class Inadmissible : public Error {
 public:
  Inadmissible(std::string condition, double margin);
  const std::string& condition() const { return condition_; }
  double margin() const { return margin_; }

 private:
  std::string condition_;
  double margin_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class HypothesisFailed : public Error {
 public:
  using Error::Error;
};

class StencilOutOfRange : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace collarkit
