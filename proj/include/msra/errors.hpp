#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace msra {

/// Invalid or overflowing code parameters (n, k, delta, q).
struct ParamError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A square system turned out singular. Thrown by solve(); callers that
/// sample random matrices catch this and resample.
struct SingularMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// MDS verification kept failing; the field is too small for (n, k, delta).
struct ConstructionFailed : std::runtime_error {
    ConstructionFailed(std::string msg, std::size_t attempts)
        : std::runtime_error(std::move(msg)), attempts(attempts) {}
    std::size_t attempts;
};

/// Repair-vector rank condition kept failing after resampling w.
struct RepairInfeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shards are inconsistent with the code that claims to have produced them.
struct CorruptCodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Cluster state machine violation (double failure, bad node id, ...).
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Fewer than k alive nodes available for reconstruction.
struct InsufficientShards : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Configuration that cannot work, e.g. byte packing too wide for q.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or mismatching descriptor / shard files.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace msra
