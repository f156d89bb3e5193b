#pragma once

#include <stdexcept>
#include <string>

namespace dynshort {

/// Thrown when an inversion hits a non-invertible pivot or matrix.
/// Non-singularity of every intermediate matrix is a caller promise for the
/// dynamic-inverse structures; over the truncated polynomial ring the edge
/// updates keep the constant term regular, so this only fires in field mode.
struct SingularError : std::runtime_error {
    explicit SingularError(const std::string& what) : std::runtime_error(what) {}
};

/// Dimension or index-set mismatch in a public API call.
struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Duplicate add or missing remove on a maintained index/source/target set.
struct SetError : std::logic_error {
    explicit SetError(const std::string& what) : std::logic_error(what) {}
};

/// Invalid edge operation: duplicate insert, missing delete, self-loop, or an
/// endpoint outside [0, n).
struct GraphError : std::logic_error {
    explicit GraphError(const std::string& what) : std::logic_error(what) {}
};

/// Malformed update stream, config file, or CLI input.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dynshort
