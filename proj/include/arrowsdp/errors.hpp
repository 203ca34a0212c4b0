#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace arrowsdp {

/// Invalid argument values: out-of-range indices, non-finite entries,
/// mismatched dimensions.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A function was called outside its documented contract (e.g. clique
/// extraction on a graph whose order is not a perfect elimination order).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A structural assumption of a decomposition does not hold. `assumption()`
/// names it ("Assumption 1" ... "Assumption 4", "C positive definite", ...).
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(std::string assumption, const std::string& detail)
      : std::invalid_argument(assumption + ": " + detail),
        assumption_(std::move(assumption)) {}
  const std::string& assumption() const noexcept { return assumption_; }

 private:
  std::string assumption_;
};

/// The matrix to be decomposed is not positive semidefinite.
class InfeasibleDecomposition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear solve failed or could not reach the requested accuracy.
class ConditioningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace arrowsdp
