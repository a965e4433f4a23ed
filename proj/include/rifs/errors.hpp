#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rifs {

/*
 * Domain error with a stable machine-readable code.  The CLI maps these to
 * exit status 1 plus a one-line JSON object on stderr; the code strings are
 * part of the external interface and must stay stable.
 */
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

inline Error err_not_contracting(const std::string& msg) { return Error("NotContracting", msg); }
inline Error err_invalid_letter(const std::string& msg) { return Error("InvalidLetter", msg); }
inline Error err_invalid_tolerance(const std::string& msg) { return Error("InvalidTolerance", msg); }
inline Error err_budget_too_small(const std::string& msg) { return Error("BudgetTooSmall", msg); }
inline Error err_out_of_range(const std::string& msg) { return Error("OutOfRange", msg); }
inline Error err_invalid_argument(const std::string& msg) { return Error("InvalidArgument", msg); }
inline Error err_invalid_translate(const std::string& msg) { return Error("InvalidTranslate", msg); }
inline Error err_undefined_series(const std::string& msg) { return Error("UndefinedSeries", msg); }
inline Error err_invalid_measure(const std::string& msg) { return Error("InvalidMeasure", msg); }
inline Error err_not_separated(const std::string& msg) { return Error("NotStronglySeparated", msg); }
inline Error err_bad_file(const std::string& msg) { return Error("BadFile", msg); }

}  // namespace rifs
