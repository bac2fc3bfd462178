#pragma once

#include <stdexcept>
#include <string>

namespace znav {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define ZNAV_ERROR(Name)                              \
  class Name : public Error {                         \
   public:                                            \
    explicit Name(const std::string& what)            \
        : Error(std::string(#Name ": ") + what) {}    \
  }

// Input-side problems (bad files, bad arguments).
ZNAV_ERROR(ValidationError);
ZNAV_ERROR(ParseError);
ZNAV_ERROR(UnknownScenarioError);

// Evaluation outside the region where the geometry is defined.
ZNAV_ERROR(DomainError);
ZNAV_ERROR(WindTooStrongError);
ZNAV_ERROR(ConvexityError);
ZNAV_ERROR(ZeroWindError);
ZNAV_ERROR(ZeroDirectionError);
ZNAV_ERROR(BetaZeroError);
ZNAV_ERROR(HypothesisNotMetError);

// Numerical breakdown.
ZNAV_ERROR(StepError);
ZNAV_ERROR(SingularError);
ZNAV_ERROR(NegativeFormError);
ZNAV_ERROR(StepFailureError);
ZNAV_ERROR(EmptyPathError);

#undef ZNAV_ERROR

}  // namespace znav
