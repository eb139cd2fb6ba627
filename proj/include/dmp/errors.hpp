#pragma once

#include <stdexcept>
#include <string>

namespace dmp {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied something malformed (bad shapes, bad files, bad flags).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a valid result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

#define DMP_DEFINE_ERROR(Name, Base)                          \
  class Name : public Base {                                  \
   public:                                                    \
    explicit Name(const std::string& what) : Base(#Name ": " + what) {} \
  };

DMP_DEFINE_ERROR(InvalidArgument, InputError)
DMP_DEFINE_ERROR(DimensionMismatch, InputError)
DMP_DEFINE_ERROR(InvalidStep, InputError)
DMP_DEFINE_ERROR(DegenerateDemo, InputError)
DMP_DEFINE_ERROR(LayoutMismatch, InputError)
DMP_DEFINE_ERROR(InvariantViolation, InputError)
DMP_DEFINE_ERROR(NoNeighbors, InputError)

DMP_DEFINE_ERROR(DomainError, NumericalError)
DMP_DEFINE_ERROR(NotSpd, NumericalError)
DMP_DEFINE_ERROR(RankDeficient, NumericalError)
DMP_DEFINE_ERROR(StepTooLarge, NumericalError)
DMP_DEFINE_ERROR(NoSwitch, NumericalError)
DMP_DEFINE_ERROR(ZeroVariance, NumericalError)

#undef DMP_DEFINE_ERROR

/// Parse failures carry the 1-based line number of the offending line.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError("ParseError: line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dmp
