#pragma once

#include <stdexcept>
#include <string>

namespace adaptsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define ADAPTSIM_ERROR_TYPE(Name)                                              \
    struct Name : Error {                                                      \
        using Error::Error;                                                    \
    }

ADAPTSIM_ERROR_TYPE(NonFiniteDerivative);
ADAPTSIM_ERROR_TYPE(Diverged);
ADAPTSIM_ERROR_TYPE(UnknownChannel);
ADAPTSIM_ERROR_TYPE(EmptyWindow);
ADAPTSIM_ERROR_TYPE(WindowOutOfRange);
ADAPTSIM_ERROR_TYPE(TraceTooShort);
ADAPTSIM_ERROR_TYPE(InsufficientSpan);
ADAPTSIM_ERROR_TYPE(SingularControl);
ADAPTSIM_ERROR_TYPE(DegenerateGrid);
ADAPTSIM_ERROR_TYPE(DependenceViolation);
ADAPTSIM_ERROR_TYPE(SlipOutOfRange);
ADAPTSIM_ERROR_TYPE(StoppedVehicle);
ADAPTSIM_ERROR_TYPE(NotTerminated);
ADAPTSIM_ERROR_TYPE(ConfigError);
ADAPTSIM_ERROR_TYPE(PreflightFailed);
ADAPTSIM_ERROR_TYPE(IoError);

#undef ADAPTSIM_ERROR_TYPE

}  // namespace adaptsim
