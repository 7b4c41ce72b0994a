#pragma once

#include <stdexcept>

namespace ccran {

/// The QoS targets cannot be met within the per-BS power budgets.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The conic solver stopped without meeting its tolerance.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No randomization candidate could be made feasible.
class RandomizationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ccran
