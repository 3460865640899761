#pragma once

#include <stdexcept>
#include <string>

namespace nvsense {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parameter-set invariant violated (bad inputs, not a solver failure).
struct InvalidParams : Error {
    using Error::Error;
};

/// Closed-form double-layer expressions require kappa*Delta > 10.
struct ScreeningRegimeError : Error {
    using Error::Error;
};

/// Adaptive integration failed to reach the requested tolerance.
struct QuadratureError : Error {
    using Error::Error;
};

/// Exponent outside the range that can be evaluated in double precision.
struct OverflowError : Error {
    using Error::Error;
};

/// First-integral radicand went negative: the requested potential lies past a
/// turning point of the interior profile.
struct RadicandNegativeError : Error {
    using Error::Error;
};

/// Root bracketing failed over the allowed search window.
struct NoBracketError : Error {
    using Error::Error;
};

/// Iterative solver hit its iteration cap without meeting tolerance.
struct NonConvergedError : Error {
    using Error::Error;
};

/// Finite-difference derivative failed its step-halving consistency check.
struct DerivativeUnstableError : Error {
    using Error::Error;
};

/// Monte Carlo discretization too coarse for the requested statistics.
struct ResolutionError : Error {
    using Error::Error;
};

/// Fit requested with fewer points than the model supports.
struct InsufficientPointsError : Error {
    using Error::Error;
};

struct DivisionByZeroError : Error {
    using Error::Error;
};

/// CLI / config file problem (maps to exit code 2 in the tool).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace nvsense
