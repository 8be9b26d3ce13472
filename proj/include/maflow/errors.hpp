#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace maflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidGrid : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be positive-definite failed its Cholesky factorization.
/// `point` is the offending grid index, or npos when no grid is involved.
class PositivityViolation : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  explicit PositivityViolation(const std::string& what, std::size_t point = npos)
      : Error(what), point_(point) {}
  std::size_t point() const { return point_; }

 private:
  std::size_t point_;
};

class ImaginaryResidue : public Error {
 public:
  using Error::Error;
};

class EigRangeViolation : public Error {
 public:
  using Error::Error;
};

class ShiftFailure : public Error {
 public:
  using Error::Error;
};

class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, double t, double dt, std::size_t point)
      : Error(what), t_(t), dt_(dt), point_(point) {}
  double t() const { return t_; }
  double dt() const { return dt_; }
  std::size_t point() const { return point_; }

 private:
  double t_;
  double dt_;
  std::size_t point_;
};

class TailAlarm : public Error {
 public:
  TailAlarm(const std::string& what, double tail) : Error(what), tail_(tail) {}
  double tail() const { return tail_; }

 private:
  double tail_;
};

class LineSearchFailure : public Error {
 public:
  using Error::Error;
};

class MaxIterations : public Error {
 public:
  using Error::Error;
};

class LinearSolveStagnation : public Error {
 public:
  using Error::Error;
};

class InsufficientSnapshots : public Error {
 public:
  using Error::Error;
};

class NonPositiveU : public Error {
 public:
  using Error::Error;
};

class SeriesTooShort : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace maflow
