#include "grpcomb/error.hpp"

namespace grpcomb {

const char *error_name(ErrorCode code)
{
  switch (code) {
  case ErrorCode::ok: return "ok";
  case ErrorCode::invalid_argument: return "invalid_argument";
  case ErrorCode::cap_exceeded: return "cap_exceeded";
  case ErrorCode::not_a_group: return "not_a_group";
  case ErrorCode::not_normal: return "not_normal";
  case ErrorCode::precondition: return "precondition";
  case ErrorCode::not_solvable: return "not_solvable";
  case ErrorCode::need_extension: return "need_extension";
  case ErrorCode::io: return "io";
  case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string &what) { throw Error(code, what); }

} // namespace grpcomb
