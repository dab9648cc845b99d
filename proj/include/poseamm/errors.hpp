#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace poseamm {

// Base of every error thrown by the library.
class PoseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "PoseError"; }
};

#define POSEAMM_DEFINE_ERROR(Name)                                   \
  class Name : public PoseError {                                    \
   public:                                                           \
    using PoseError::PoseError;                                      \
    const char* kind() const noexcept override { return #Name; }     \
  }

POSEAMM_DEFINE_ERROR(AmbiguousProjection);
POSEAMM_DEFINE_ERROR(SingularTranslationSystem);
POSEAMM_DEFINE_ERROR(NonFiniteObjective);
POSEAMM_DEFINE_ERROR(EmptyData);
POSEAMM_DEFINE_ERROR(RankDeficientSystem);
POSEAMM_DEFINE_ERROR(InsufficientData);
POSEAMM_DEFINE_ERROR(DegenerateNullspace);
POSEAMM_DEFINE_ERROR(SingularSystem);
POSEAMM_DEFINE_ERROR(InvalidArgument);

#undef POSEAMM_DEFINE_ERROR

// Errors tied to a line of an input file. `line` is 1-based.
class LineError : public PoseError {
 public:
  LineError(std::size_t line, const std::string& what)
      : PoseError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ParseError : public LineError {
 public:
  using LineError::LineError;
  const char* kind() const noexcept override { return "ParseError"; }
};

class ConstraintViolation : public LineError {
 public:
  using LineError::LineError;
  const char* kind() const noexcept override { return "ConstraintViolation"; }
};

}  // namespace poseamm
