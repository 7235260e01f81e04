#pragma once

#include <stdexcept>
#include <string>

namespace dtr {

// Library error categories. The C API maps these one-to-one onto dtr_status
// codes, so the set is append-only.
enum class ErrorCode {
  invalid_argument,
  non_finite,
  rank_deficient,
  dimension_mismatch,
  not_psd,
  empty_input,
  too_short,
  fold_rank_deficient,
  p_too_small,
  io_error,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_error(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace dtr
