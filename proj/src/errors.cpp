#include "dfoq/errors.hpp"

namespace dfoq {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid input";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kNotPoised: return "not poised";
    case ErrorKind::kEvaluation: return "evaluation error";
    case ErrorKind::kPrecondition: return "precondition violated";
    case ErrorKind::kDomain: return "domain error";
  }
  return "error";
}

}  // namespace dfoq
