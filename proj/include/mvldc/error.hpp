#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mvldc {

enum class ErrorKind {
  kInvalidArgument,    // malformed input or violated precondition
  kContractViolation,  // a postcondition or structural invariant failed
  kLimitExceeded,      // a configured size/complexity guard refused the work
  kInternal,           // should be impossible when the math holds
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
      return "invalid_argument";
    case ErrorKind::kContractViolation:
      return "contract_violation";
    case ErrorKind::kLimitExceeded:
      return "limit_exceeded";
    case ErrorKind::kInternal:
      return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::kInvalidArgument, what);
}

}  // namespace mvldc
