#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace merw {

// Thrown when an exact enumeration would exceed its state budget.
// Carries the number of states the request would need.
class BudgetError : public std::runtime_error {
 public:
  BudgetError(std::uint64_t required, std::uint64_t budget)
      : std::runtime_error("enumeration budget exceeded: " +
                           std::to_string(required) + " states required, budget is " +
                           std::to_string(budget)),
        required_states(required),
        budget_states(budget) {}

  std::uint64_t required_states;
  std::uint64_t budget_states;
};

// Thrown for operations the model deliberately leaves unsupported.
class NotImplementedError : public std::logic_error {
 public:
  explicit NotImplementedError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace merw
