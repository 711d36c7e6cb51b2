#pragma once

#include <stdexcept>
#include <string>

namespace ambiup {

// Recoverable I/O failure (missing file, short read, bad permissions).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structurally invalid input data (malformed WAV, bad grid file, corrupt checkpoint).
class FormatError : public IoError {
public:
    using IoError::IoError;
};

// Invalid argument values use std::invalid_argument directly.

}  // namespace ambiup
