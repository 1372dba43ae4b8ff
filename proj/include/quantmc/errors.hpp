#pragma once

#include <stdexcept>

namespace quantmc {

/// Unreadable or unwritable files.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input file that exists but has malformed content; message carries
/// "path:line: what".
struct ParseError : IoError {
    using IoError::IoError;
};

/// Numerical breakdown: SVD failure, non-finite objective, line-search
/// step underflow.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace quantmc
