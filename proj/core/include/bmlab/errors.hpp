#pragma once

#include <stdexcept>
#include <string>

namespace bmlab {

// Failure classes map 1:1 onto CLI exit codes (0 = success).
enum class ErrorClass : int {
  Config = 2,
  Numerical = 3,
  Budget = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& msg) : std::runtime_error(msg), cls_(cls) {}
  ErrorClass cls() const noexcept { return cls_; }
  int exit_code() const noexcept { return static_cast<int>(cls_); }

 private:
  ErrorClass cls_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(ErrorClass::Config, msg) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& msg) : Error(ErrorClass::Numerical, msg) {}
};

struct BudgetError : Error {
  explicit BudgetError(const std::string& msg) : Error(ErrorClass::Budget, msg) {}
};

// rank preconditions are caller contract violations, not numeric accidents
struct RankError : ConfigError {
  explicit RankError(const std::string& msg) : ConfigError(msg) {}
};

struct NormalizationError : NumericalError {
  explicit NormalizationError(const std::string& msg) : NumericalError(msg) {}
};

struct DegeneratePoints : NumericalError {
  explicit DegeneratePoints(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace bmlab
