#pragma once

#include <stdexcept>
#include <string>

namespace qmdim {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed graph / instance / model text. Carries the offending line when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A documented precondition of an operation does not hold for its inputs.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

/// Input exceeds the size an exhaustive search is allowed to attempt.
class SizeLimitError : public Error {
 public:
  using Error::Error;
};

/// A ratio bound whose denominator vanishes.
class UndefinedBound : public Error {
 public:
  using Error::Error;
};

/// The object handed to a backward extraction does not certify a yes-instance.
class WitnessInvalid : public Error {
 public:
  using Error::Error;
};

/// Operator norms of POVM elements are below the rigidity hypothesis.
class PreconditionError : public WitnessInvalid {
 public:
  using WitnessInvalid::WitnessInvalid;
};

class RigidityViolation : public WitnessInvalid {
 public:
  using WitnessInvalid::WitnessInvalid;
};

class RankViolation : public WitnessInvalid {
 public:
  using WitnessInvalid::WitnessInvalid;
};

/// A Gram entry fell strictly between "parallel" and "perpendicular".
class DichotomyViolation : public WitnessInvalid {
 public:
  using WitnessInvalid::WitnessInvalid;
};

class NotAWitness : public WitnessInvalid {
 public:
  using WitnessInvalid::WitnessInvalid;
};

class ExtractionAmbiguity : public WitnessInvalid {
 public:
  using WitnessInvalid::WitnessInvalid;
};

}  // namespace qmdim
