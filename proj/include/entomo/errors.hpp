#pragma once

#include <stdexcept>
#include <string>

namespace entomo {

/// Invalid argument to an operation (chain length, subsystem size, spectrum length, ...).
class ParameterError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Operator and state (or two operands) live in different bases.
class BasisMismatch : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Dense work requested above the configured dimension cap.
class CapacityError : public std::runtime_error {
  public:
    CapacityError(const std::string &what, long dim, long cap)
        : std::runtime_error(what + " (dimension " + std::to_string(dim) + " exceeds cap " +
                             std::to_string(cap) + "; use the Krylov propagator)"),
          dim_(dim), cap_(cap) {}
    long dim() const noexcept { return dim_; }
    long cap() const noexcept { return cap_; }

  private:
    long dim_;
    long cap_;
};

/// Iterative method failed to reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string &what, double achieved)
        : std::runtime_error(what + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

  private:
    double achieved_;
};

} // namespace entomo
