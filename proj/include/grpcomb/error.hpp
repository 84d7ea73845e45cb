#pragma once

#include <stdexcept>
#include <string>

namespace grpcomb {

// Numeric values are mirrored by the C API (gc_status).
enum class ErrorCode {
  ok = 0,
  invalid_argument = 1,
  cap_exceeded = 2,
  not_a_group = 3,
  not_normal = 4,
  precondition = 5,
  not_solvable = 6,
  need_extension = 7,
  io = 8,
  internal = 9,
};

const char *error_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string &what)
    : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string &what);

inline void require(bool cond, ErrorCode code, const std::string &what)
{
  if (!cond)
    fail(code, what);
}

} // namespace grpcomb
