#pragma once

#include <stdexcept>
#include <string>

namespace biaslin {

/// Raised when inputs violate an operation's preconditions (CLI exit status 1).
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Raised when a well-posed computation fails to produce a result (CLI exit status 2).
class ComputationError : public std::runtime_error {
 public:
  ComputationError(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define BIASLIN_VALIDATION_ERROR(Name, Kind)                                  \
  class Name : public ValidationError {                                       \
   public:                                                                    \
    explicit Name(const std::string& what) : ValidationError(Kind, what) {}  \
  };

#define BIASLIN_COMPUTATION_ERROR(Name, Kind)                                 \
  class Name : public ComputationError {                                      \
   public:                                                                    \
    explicit Name(const std::string& what) : ComputationError(Kind, what) {} \
  };

BIASLIN_VALIDATION_ERROR(ParseError, "parse")
BIASLIN_VALIDATION_ERROR(InvalidArityError, "invalid-arity")
BIASLIN_VALIDATION_ERROR(OutOfRangeError, "out-of-range")
BIASLIN_VALIDATION_ERROR(BoundaryInfeasibleError, "boundary-infeasible")
BIASLIN_VALIDATION_ERROR(UnsupportedShapeError, "unsupported-shape")
BIASLIN_VALIDATION_ERROR(InvalidMixtureError, "invalid-mixture")
BIASLIN_VALIDATION_ERROR(InvalidDistributionError, "invalid-distribution")
BIASLIN_VALIDATION_ERROR(PreconditionError, "precondition")
BIASLIN_VALIDATION_ERROR(DegreeError, "degree")
BIASLIN_VALIDATION_ERROR(PairwiseIndependenceError, "pairwise-independent")
BIASLIN_VALIDATION_ERROR(ModeError, "mode")
BIASLIN_VALIDATION_ERROR(SizeError, "size")
BIASLIN_VALIDATION_ERROR(IndexError, "index")

BIASLIN_COMPUTATION_ERROR(MatrixError, "matrix")
BIASLIN_COMPUTATION_ERROR(NotFoundError, "not-found")
BIASLIN_COMPUTATION_ERROR(ConvergenceError, "convergence")
BIASLIN_COMPUTATION_ERROR(InternalError, "internal")

#undef BIASLIN_VALIDATION_ERROR
#undef BIASLIN_COMPUTATION_ERROR

}  // namespace biaslin
