#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rwre {

// Caller supplied something outside an operation's contract.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A lazily evaluated quantity could not be resolved within its configured
// budget (backward-coalescence depth, forward scan horizon, walk horizon).
class CensoredError : public std::runtime_error {
 public:
  CensoredError(const std::string& what, std::int64_t partial_value,
                std::int64_t budget_used)
      : std::runtime_error(what),
        partial_value_(partial_value),
        budget_used_(budget_used) {}

  // Last value seen before the budget ran out.
  std::int64_t partial_value() const { return partial_value_; }
  std::int64_t budget_used() const { return budget_used_; }

 private:
  std::int64_t partial_value_;
  std::int64_t budget_used_;
};

// A requested computation does not fit the configured memory/work window.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A sampler's acceptance rate fell below its configured floor.
class DiagnosticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rwre
