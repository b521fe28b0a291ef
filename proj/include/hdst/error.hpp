#pragma once

#include <stdexcept>
#include <string>

namespace hdst {

// Mirrors hdst_status in hdst.h; values must stay in sync.
enum class ErrorCode : int {
  invalid_argument = 1,
  dimension_mismatch = 2,
  out_of_range = 3,
  unsupported_config = 4,
  tie = 5,
  empty_class = 6,
  parse = 7,
  schema = 8,
  data = 9,
  io = 10,
  config = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace hdst
