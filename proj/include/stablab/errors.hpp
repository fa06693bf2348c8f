#pragma once

#include <stdexcept>
#include <string>

namespace stablab {

// Error taxonomy. Each type corresponds to one recoverable failure mode of a
// specific operation; everything else (programming errors, bad dimensions)
// throws std::invalid_argument / std::logic_error directly.

struct DegenerateSpectralMeasure : std::runtime_error {
    explicit DegenerateSpectralMeasure(const std::string& what) : std::runtime_error(what) {}
};

struct GridTooCoarse : std::runtime_error {
    explicit GridTooCoarse(const std::string& what) : std::runtime_error(what) {}
};

struct SpectralTailTooLarge : std::runtime_error {
    explicit SpectralTailTooLarge(const std::string& what) : std::runtime_error(what) {}
};

struct NoContraction : std::runtime_error {
    explicit NoContraction(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientNodes : std::runtime_error {
    explicit InsufficientNodes(const std::string& what) : std::runtime_error(what) {}
};

struct LambdaCapExceeded : std::runtime_error {
    explicit LambdaCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
    explicit NoConvergence(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace stablab
