#pragma once

#include <stdexcept>
#include <string>

namespace sdstein {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define SDSTEIN_DEFINE_ERROR(Name)          \
  struct Name : Error {                     \
    using Error::Error;                     \
  }

// levy_model
SDSTEIN_DEFINE_ERROR(NonPositiveRadius);
SDSTEIN_DEFINE_ERROR(UnknownDirection);
SDSTEIN_DEFINE_ERROR(QuadratureFailure);
// charfn
SDSTEIN_DEFINE_ERROR(DivergentIntegral);
SDSTEIN_DEFINE_ERROR(NonIntegrableCF);
SDSTEIN_DEFINE_ERROR(GridTooCoarse);
// sampling
SDSTEIN_DEFINE_ERROR(UnsupportedLaw);
SDSTEIN_DEFINE_ERROR(TruncationBudgetExceeded);
SDSTEIN_DEFINE_ERROR(InfiniteIntensity);
// semigroup
SDSTEIN_DEFINE_ERROR(RouteUnavailable);
SDSTEIN_DEFINE_ERROR(DivergentJumpIntegral);
SDSTEIN_DEFINE_ERROR(BudgetExceeded);
SDSTEIN_DEFINE_ERROR(TailNotConverged);
// stein_kernel
SDSTEIN_DEFINE_ERROR(InfiniteSecondMomentNu);
SDSTEIN_DEFINE_ERROR(SingularSystem);
SDSTEIN_DEFINE_ERROR(DegenerateDenominator);
SDSTEIN_DEFINE_ERROR(MomentMismatch);
// distances
SDSTEIN_DEFINE_ERROR(SizeMismatch);
SDSTEIN_DEFINE_ERROR(SizeTooLarge);
SDSTEIN_DEFINE_ERROR(EmptyDictionary);
// harness
SDSTEIN_DEFINE_ERROR(UnknownExperiment);
SDSTEIN_DEFINE_ERROR(ConfigInvalid);

#undef SDSTEIN_DEFINE_ERROR

}  // namespace sdstein
