#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mbqc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kAngleTol = 1e-12;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class InvalidInput : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_input"; }
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const char* kind() const noexcept override { return "parse_error"; }

 private:
  std::size_t line_;
};

class DependencyCycle : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dependency_cycle"; }
};

class CapacityExhausted : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "capacity_exhausted"; }
};

class DelayViolation : public Error {
 public:
  DelayViolation(std::int64_t node, const std::string& what)
      : Error(what), node_(node) {}
  std::int64_t node() const noexcept { return node_; }
  const char* kind() const noexcept override { return "delay_violation"; }

 private:
  std::int64_t node_;
};

class InternalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "internal_error"; }
};

/// Maps any finite angle into [0, 2*pi); values within kAngleTol of 2*pi
/// collapse to 0.
inline double canonical_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r < kAngleTol || kTwoPi - r < kAngleTol) return 0.0;
  return r;
}

/// True when the angle is a multiple of pi/2 (a Pauli-plane measurement).
inline bool is_clifford_angle(double a) {
  const double q = canonical_angle(a) / (kPi / 2);
  return std::abs(q - std::round(q)) * (kPi / 2) < kAngleTol;
}

inline bool angles_equal(double a, double b) {
  const double d = canonical_angle(a - b);
  return d < kAngleTol || kTwoPi - d < kAngleTol;
}

}  // namespace mbqc
