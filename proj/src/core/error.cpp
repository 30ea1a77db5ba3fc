#include "ewm/error.hpp"

namespace ewm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ok: return "ok";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::not_converged: return "not converged";
    case ErrorCode::evolution_aborted: return "evolution aborted";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::config: return "config error";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ewm
