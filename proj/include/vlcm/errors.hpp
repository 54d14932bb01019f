#pragma once

#include <stdexcept>
#include <string>

namespace vlcm {

// Hex input could not be parsed (empty, bad digit, zero value).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Configuration is structurally invalid (bad p, infeasible delay bound, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A solver or graph operation violated an internal contract.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact search ran out of its state budget.
struct BudgetExceeded : SolverError {
  explicit BudgetExceeded(std::size_t states)
      : SolverError("exact search budget exceeded after " +
                    std::to_string(states) + " states"),
        states_explored(states) {}
  std::size_t states_explored;
};

}  // namespace vlcm
