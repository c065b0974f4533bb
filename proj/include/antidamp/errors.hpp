#pragma once

#include <stdexcept>
#include <string>

namespace antidamp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the admissible set (prior set, window, spatial domain).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Parameter sits on (or within the exclusion margin of) a value where the
/// spectrum degenerates, e.g. q = 1 for the wave model.
class SingularParameterError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The observation window carries (numerically) no energy.
class ZeroSignalError : public Error {
 public:
  using Error::Error;
};

/// The estimated growth rate maps outside the prior set. The raw growth rate
/// is kept so sweeps can log it instead of aborting.
class PriorSetError : public Error {
 public:
  PriorSetError(const std::string& what, double f_hat, double q_raw)
      : Error(what), f_hat_(f_hat), q_raw_(q_raw) {}
  double f_hat() const noexcept { return f_hat_; }
  double q_raw() const noexcept { return q_raw_; }

 private:
  double f_hat_;
  double q_raw_;
};

class CoefficientDegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Disturbance energy exceeds the far-window norm; the f-error bound is undefined.
class BoundUnavailable : public Error {
 public:
  using Error::Error;
};

class GapWindowError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace antidamp
