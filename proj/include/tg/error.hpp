#pragma once

#include <stdexcept>
#include <string>

namespace tg {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input data (unsorted after validation, t_start > t_end, ...).
struct ValidationError : Error {
    using Error::Error;
};

// File could not be read or a row could not be parsed.
struct ParseError : Error {
    using Error::Error;
};

// Bad configuration value or argument.
struct ParameterError : Error {
    using Error::Error;
};

// A split fraction produced an empty train/val/test part.
struct SplitError : Error {
    using Error::Error;
};

// Timestamp outside the covered range.
struct RangeError : Error {
    using Error::Error;
};

// Event not covered by the partition handed to the discretizer.
struct CoverageError : Error {
    using Error::Error;
};

// Evaluation protocol violation: out-of-order batches or querying with
// state that is stale or already contains the queried interval.
struct ProtocolError : Error {
    using Error::Error;
};

// Model parameters changed while gradient updates were forbidden.
struct LeakageError : Error {
    using Error::Error;
};

// Training cannot run on the given sequence/config.
struct TrainError : Error {
    using Error::Error;
};

}  // namespace tg
