#pragma once

#include <stdexcept>
#include <string>

namespace sphparisi {

// Argument outside the mathematical domain of an operation (|x| > 1, b <= d_1, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An iterative solver gave up; carries the best information it had.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Cost or memory guard tripped (tensor size, RSB depth, tuple enumeration).
class ResourceGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Not enough independent replicas/chains for a requested statistic.
class InsufficientReplicasError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sphparisi
