#pragma once

#include <stdexcept>
#include <string>

namespace qcs {

// Argument outside the mathematical domain of an operation (cut, zero, seam).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Iterative method failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not enough usable data for a fit or regression.
class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qcs
