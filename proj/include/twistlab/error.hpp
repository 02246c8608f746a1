#pragma once

#include <stdexcept>
#include <string>

namespace twistlab {

// Base class for every recoverable failure raised by the library. Precondition
// violations on plain arguments (negative counts etc.) use std::invalid_argument.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define TWISTLAB_DEFINE_ERROR(name)                                                                                    \
    struct name : Error {                                                                                              \
        using Error::Error;                                                                                            \
    }

// A map evaluation produced y outside [0,1] (beyond the equivariance slack).
TWISTLAB_DEFINE_ERROR(DomainEscape);
// The rotation interval of the boundary-0 restriction straddles an integer.
TWISTLAB_DEFINE_ERROR(AmbiguousNormalization);
// Sampled strict monotonicity of a circle lift failed.
TWISTLAB_DEFINE_ERROR(NonMonotoneDetected);
// Adaptive iteration would exceed its configured cap.
TWISTLAB_DEFINE_ERROR(BudgetExceeded);
// No parameter in the range yields the requested rational rotation number.
TWISTLAB_DEFINE_ERROR(TongueMissed);
// Family parameters violate the construction constraints.
TWISTLAB_DEFINE_ERROR(InvalidFamily);
// The locked-suspension precondition could not be certified.
TWISTLAB_DEFINE_ERROR(NotLocked);
// Billiard state too close to a grazing angle.
TWISTLAB_DEFINE_ERROR(GrazingInput);
// Curve candidate too sparse for slope estimates.
TWISTLAB_DEFINE_ERROR(InsufficientDensity);
// Curve candidate is not invariant within tolerance.
TWISTLAB_DEFINE_ERROR(NotInvariant);
// Two curve candidates intersect at sampled resolution.
TWISTLAB_DEFINE_ERROR(NotDisjoint);
// Malformed or unknown configuration input.
TWISTLAB_DEFINE_ERROR(ConfigError);

#undef TWISTLAB_DEFINE_ERROR

} // namespace twistlab
