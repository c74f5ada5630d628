#pragma once

#include <stdexcept>
#include <string>

namespace centerkit {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define CENTERKIT_DEFINE_ERROR(Name)             \
    struct Name : Error {                        \
        using Error::Error;                      \
        Name() : Error(#Name) {}                 \
    }

/* linalg */
CENTERKIT_DEFINE_ERROR(NotConjugate);
CENTERKIT_DEFINE_ERROR(NotCollinear);
CENTERKIT_DEFINE_ERROR(ZeroMap);
CENTERKIT_DEFINE_ERROR(NotInFamily);

/* fields */
CENTERKIT_DEFINE_ERROR(InvalidSpec);
CENTERKIT_DEFINE_ERROR(MissingGradient);

/* flow */
CENTERKIT_DEFINE_ERROR(StepFailure);
CENTERKIT_DEFINE_ERROR(Escape);
CENTERKIT_DEFINE_ERROR(NoReturn);

/* polar */
CENTERKIT_DEFINE_ERROR(OriginHasNoAngle);
CENTERKIT_DEFINE_ERROR(NotOriginPreserving);
CENTERKIT_DEFINE_ERROR(JetNotScalar);
CENTERKIT_DEFINE_ERROR(NotZInvariant);
CENTERKIT_DEFINE_ERROR(NotFlat);

/* shift */
CENTERKIT_DEFINE_ERROR(VanishingImage);
CENTERKIT_DEFINE_ERROR(SingularIntegrand);
CENTERKIT_DEFINE_ERROR(NotPTC);
CENTERKIT_DEFINE_ERROR(NotOrbitPreserving);
CENTERKIT_DEFINE_ERROR(OrientationReversing);

/* jets */
CENTERKIT_DEFINE_ERROR(NotDivisible);
CENTERKIT_DEFINE_ERROR(DegeneratePoint);

#undef CENTERKIT_DEFINE_ERROR

}  // namespace centerkit
