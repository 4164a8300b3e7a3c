#pragma once
#include <stdexcept>
#include <string>

namespace leofl {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// orbital
struct NotInCoverage : Error { using Error::Error; };

// linkmodel
struct NonPositiveNoise : Error { using Error::Error; };
struct ZeroRate : Error { using Error::Error; };

// resource
struct ZeroFrequency : Error { using Error::Error; };
struct WindowTooShort : Error { using Error::Error; };
struct NoData : Error { using Error::Error; };

// aggregation
struct EmptyReportSet : Error { using Error::Error; };
struct ZeroTotalLoss : Error { using Error::Error; };
struct LayoutMismatch : Error { using Error::Error; };
struct UnnormalizedWeights : Error { using Error::Error; };
struct AllZeroMass : Error { using Error::Error; };

// learner
struct DimensionMismatch : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct TooSmall : Error { using Error::Error; };

// harness
struct IoFailure : Error { using Error::Error; };

} // namespace leofl
