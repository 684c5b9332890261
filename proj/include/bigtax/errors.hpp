#pragma once

#include <stdexcept>
#include <string>

namespace bigtax {

// error codes shared between the C++ exceptions and the C API
enum class ErrorCode : int {
  ok = 0,
  io = 1,            // file not found, unreadable, unwritable
  parse = 2,         // malformed CSV/JSON/spec string
  invalid_argument = 3,
  empty_data = 4,    // header-only file, zero rows after delete, ...
  schema_mismatch = 5,
  missing_values = 6,
  constant_column = 7,
  singular = 8,      // covariance not invertible without regularization
  not_converged = 9,
  unsupported = 10,  // e.g. SVM on g > 2
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &msg) {
  throw Error(code, msg);
}

}  // namespace bigtax
