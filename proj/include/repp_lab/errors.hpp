#ifndef REPP_LAB_ERRORS_HPP
#define REPP_LAB_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace repp_lab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define REPP_LAB_DEFINE_ERROR(Name)          \
    struct Name : Error {                    \
        using Error::Error;                  \
    }

REPP_LAB_DEFINE_ERROR(NonFiniteInput);
REPP_LAB_DEFINE_ERROR(OutOfDomain);
REPP_LAB_DEFINE_ERROR(NoSignChange);
REPP_LAB_DEFINE_ERROR(NotPrimePeriod);
REPP_LAB_DEFINE_ERROR(BetaTooLarge);
REPP_LAB_DEFINE_ERROR(RootNotBracketed);
REPP_LAB_DEFINE_ERROR(NoPeriodicPointFound);
REPP_LAB_DEFINE_ERROR(InvalidFamily);
REPP_LAB_DEFINE_ERROR(InvalidMap);
REPP_LAB_DEFINE_ERROR(InsufficientBaseSamples);
REPP_LAB_DEFINE_ERROR(InsufficientData);
REPP_LAB_DEFINE_ERROR(TargetUnreachable);
REPP_LAB_DEFINE_ERROR(TooFewSamples);
REPP_LAB_DEFINE_ERROR(ZeroMean);
REPP_LAB_DEFINE_ERROR(TargetNotCylinderAligned);
REPP_LAB_DEFINE_ERROR(DepthInsufficient);
REPP_LAB_DEFINE_ERROR(NotPeriodic);
REPP_LAB_DEFINE_ERROR(ConfigInvalid);
REPP_LAB_DEFINE_ERROR(IoFailure);
REPP_LAB_DEFINE_ERROR(PreconditionFailed);

#undef REPP_LAB_DEFINE_ERROR

// Derivative query at (or within tolerance of) a non-differentiable junction.
struct AtBranchBoundary : Error {
    explicit AtBranchBoundary(const std::string& what, long orbit_index = -1)
        : Error(what), index(orbit_index) {}
    long index;
};

// First-return walk exceeded its iteration cap; callers treat the excursion
// as censored and count it separately.
struct ReturnCapExceeded : Error {
    explicit ReturnCapExceeded(std::uint64_t cap_)
        : Error("return-time cap exceeded (cap=" + std::to_string(cap_) + ")"), cap(cap_) {}
    std::uint64_t cap;
};

}  // namespace repp_lab

#endif
