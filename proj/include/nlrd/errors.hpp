#ifndef NLRD_ERRORS_HPP
#define NLRD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nlrd {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument or parameter set was violated.
struct InvalidArgumentError : Error {
    using Error::Error;
};

/// Operation is not defined for the given object (e.g. pointwise value of a delta kernel).
struct UnsupportedOperationError : Error {
    using Error::Error;
};

/// A combination of settings is not implemented (e.g. spectral convolution with zero-flux walls).
struct ConfigError : Error {
    using Error::Error;
};

/// The dispersion scan window was too short to bracket the minimum.
struct ScanRangeError : Error {
    using Error::Error;
};

/// An input hit a removable or genuine singularity of the formula.
struct SingularInputError : Error {
    using Error::Error;
};

/// A critical-curve branch index outside the admissible (odd) set was requested.
struct InvalidBranchError : Error {
    using Error::Error;
};

/// The phase-plane trajectory hit the line 1 - gamma*c = 0.
struct SingularOrbitError : Error {
    using Error::Error;
};

/// The phase-plane trajectory did not return to the section within the step budget.
struct NonClosedOrbitError : Error {
    using Error::Error;
};

/// No level crossing could be found in enough snapshots to fit a front.
struct NoFrontError : Error {
    using Error::Error;
};

/// The explicit scheme produced a non-finite or runaway field.
struct BlowUpError : Error {
    double t;
    explicit BlowUpError(double t_fail, const std::string& msg) : Error(msg), t(t_fail) {}
};

/// Artifact files could not be written or read.
struct IoError : Error {
    using Error::Error;
};

} // namespace nlrd

#endif
