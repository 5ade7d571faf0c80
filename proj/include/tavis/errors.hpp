// errors.hpp — exception hierarchy shared by every module.
//
// Each exception carries an ErrorClass so the CLI can map failures onto
// distinct exit codes without string matching.

#pragma once

#include <stdexcept>
#include <string>

namespace tavis {

enum class ErrorClass {
    Config,     // malformed input, violated preconditions
    Numerical,  // nonconvergence, singular or ill-conditioned solves
    Regime,     // operation called outside the parameter regime it is defined for
};

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), class_(cls) {}
    ErrorClass error_class() const noexcept { return class_; }

private:
    ErrorClass class_;
};

#define TAVIS_DEFINE_ERROR(Name, Cls)                                              \
    class Name : public Error {                                                    \
    public:                                                                        \
        explicit Name(const std::string& what) : Error(ErrorClass::Cls, what) {}   \
    }

TAVIS_DEFINE_ERROR(DimensionMismatch, Config);
TAVIS_DEFINE_ERROR(InvalidArgument, Config);
TAVIS_DEFINE_ERROR(GridTooShort, Config);
TAVIS_DEFINE_ERROR(NormViolation, Config);
TAVIS_DEFINE_ERROR(ExcitationOverflow, Config);

TAVIS_DEFINE_ERROR(SingularResolvent, Numerical);
TAVIS_DEFINE_ERROR(StepTooLarge, Numerical);
TAVIS_DEFINE_ERROR(NonConvergence, Numerical);
TAVIS_DEFINE_ERROR(IllConditioned, Numerical);

TAVIS_DEFINE_ERROR(RegimeViolation, Regime);

#undef TAVIS_DEFINE_ERROR

}  // namespace tavis
