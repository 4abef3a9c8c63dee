#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace contactlab {

class WaveField;

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input. `code` is a stable identifier so callers can tell cases apart.
class ValidationError : public Error {
 public:
  ValidationError(std::string code, const std::string& what)
      : Error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// The mathematics failed (no convergence, collapse, singular solve).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : NumericalError(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

class CollapseError : public NumericalError {
 public:
  CollapseError(const std::string& what, std::shared_ptr<const WaveField> last)
      : NumericalError(what), last_(std::move(last)) {}
  // Last finite state seen before the abort (may be null).
  const std::shared_ptr<const WaveField>& last_valid() const noexcept { return last_; }

 private:
  std::shared_ptr<const WaveField> last_;
};

class InvertibilityError : public NumericalError {
 public:
  InvertibilityError(const std::string& what, double norm)
      : NumericalError(what), norm_(norm) {}
  double norm() const noexcept { return norm_; }

 private:
  double norm_;
};

// Malformed file. Size mismatches carry the expected and actual byte counts.
class FormatError : public Error {
 public:
  FormatError(std::string code, const std::string& what, std::uintmax_t expected = 0, std::uintmax_t actual = 0)
      : Error(code + ": " + what), code_(std::move(code)), expected_(expected), actual_(actual) {}
  const std::string& code() const noexcept { return code_; }
  std::uintmax_t expected_bytes() const noexcept { return expected_; }
  std::uintmax_t actual_bytes() const noexcept { return actual_; }

 private:
  std::string code_;
  std::uintmax_t expected_, actual_;
};

}  // namespace contactlab
