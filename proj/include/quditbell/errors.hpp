#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace quditbell {

// Bad user-supplied data: malformed files, invalid partitions, tables that
// fail normalization.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation would exceed its configured size or enumeration budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, long double required)
      : std::runtime_error(what), required_(required) {}

  // Work units the request would need (strategies, matrix entries, ...).
  long double required() const { return required_; }

 private:
  long double required_;
};

}  // namespace quditbell
