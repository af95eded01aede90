#pragma once

#include <stdexcept>
#include <string>

namespace swarmwall {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite coordinates, malformed arguments.
struct InvalidInputError : Error {
    using Error::Error;
};

// Tensor shape disagreement.
struct DimensionError : Error {
    using Error::Error;
};

// Batchnorm asked to normalize a train-mode batch of one.
struct InvalidBatchError : Error {
    using Error::Error;
};

// Attention row with no valid token.
struct InvalidMaskError : Error {
    using Error::Error;
};

// NaN/Inf reached a gradient or loss.
struct NumericError : Error {
    using Error::Error;
};

// Robot placement cannot satisfy the scenario constraints.
struct ScenarioError : Error {
    using Error::Error;
};

// Unknown robot id.
struct LookupError : Error {
    using Error::Error;
};

// Checkpoint load failures, kept distinct so callers can tell them apart.
struct CheckpointVersionError : Error {
    using Error::Error;
};
struct CheckpointShapeError : Error {
    using Error::Error;
};
struct CheckpointCorruptError : Error {
    using Error::Error;
};

// CSV parsing, message names the offending row.
struct CsvParseError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace swarmwall
