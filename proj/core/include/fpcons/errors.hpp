#pragma once

#include <stdexcept>
#include <string>

namespace fpcons {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NotSymmetric : Error { using Error::Error; };
struct Singular : Error { using Error::Error; };
struct NotUnit : Error { using Error::Error; };
struct ConvergenceFailure : Error { using Error::Error; };
struct NewtonDivergence : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct FitDegenerate : Error { using Error::Error; };
struct PreconditionFailed : Error { using Error::Error; };
struct NonHyperbolicState : Error { using Error::Error; };
struct Blowup : Error { using Error::Error; };

}  // namespace fpcons
