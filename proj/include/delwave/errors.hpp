#pragma once

#include <stdexcept>
#include <string>

namespace delwave {

/// Base class for all numerical failures raised by this library.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// charpoly
struct BoundaryRootError : NumericError { using NumericError::NumericError; };
struct NonIntegerWindingError : NumericError { using NumericError::NumericError; };
struct NewtonDivergenceError : NumericError { using NumericError::NumericError; };
struct StripEscapeError : NumericError { using NumericError::NumericError; };

// green
struct DegenerateRootError : NumericError { using NumericError::NumericError; };
struct PoleOnContourError : NumericError { using NumericError::NumericError; };
struct TruncationFailureError : NumericError { using NumericError::NumericError; };
struct NegativityViolationError : NumericError { using NumericError::NumericError; };

// perron
struct MissingCertificateError : NumericError { using NumericError::NumericError; };
struct GridTooCoarseError : NumericError { using NumericError::NumericError; };

// waves
struct RangeViolationError : NumericError { using NumericError::NumericError; };
struct OrderingViolationError : NumericError { using NumericError::NumericError; };
struct NoConvergenceError : NumericError { using NumericError::NumericError; };

// models
struct GuardViolationError : NumericError { using NumericError::NumericError; };
struct RootOrderViolationError : NumericError { using NumericError::NumericError; };

// simulate
struct CFLViolationError : NumericError { using NumericError::NumericError; };
struct HistoryUnderflowError : NumericError { using NumericError::NumericError; };
struct NoFrontError : NumericError { using NumericError::NumericError; };

}  // namespace delwave
