#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace vortex {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed descriptor, non-finite data, invalid parameters.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// The field has no vortical (lambda2 < 0) values to work with.
class NoVorticalValuesError : public Error {
 public:
  using Error::Error;
};

// A histogram range collapsed (too few distinct values to bin).
class DegenerateRangeError : public Error {
 public:
  using Error::Error;
};

// No samples below the initial threshold, so no isovalue schedule exists.
class EmptyScheduleError : public Error {
 public:
  using Error::Error;
};

// Process exit codes of the command line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitEmptyResult = 3;
inline constexpr int kExitInternal = 4;

// A pipeline stage failed; carries the stage name and the exit code of the
// underlying error.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what, int exit_code = kExitInternal)
      : Error("stage '" + stage + "': " + what), stage_(std::move(stage)), exit_code_(exit_code) {}
  [[nodiscard]] const std::string& stage() const noexcept { return stage_; }
  [[nodiscard]] int exit_code() const noexcept { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

inline int exit_code_for(const std::exception& e) noexcept {
  if (const auto* s = dynamic_cast<const StageError*>(&e)) return s->exit_code();
  if (dynamic_cast<const ValidationError*>(&e)) return kExitValidation;
  if (dynamic_cast<const NoVorticalValuesError*>(&e) || dynamic_cast<const DegenerateRangeError*>(&e) ||
      dynamic_cast<const EmptyScheduleError*>(&e))
    return kExitEmptyResult;
  return kExitInternal;
}

}  // namespace vortex
