#pragma once

#include <stdexcept>
#include <string>

namespace dfoq {

enum class ErrorKind {
  kInvalidInput,
  kInfeasible,
  kNotPoised,
  kEvaluation,
  kPrecondition,
  kDomain,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so the CLI can map it to an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace dfoq
