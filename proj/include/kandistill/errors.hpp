#pragma once

#include <stdexcept>
#include <string>

namespace kandistill {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad value supplied by the caller (out-of-range parameter, non-finite input).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Tensor/vector shapes do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Malformed input text; message carries file:line context where available.
class ParseError : public Error {
public:
    using Error::Error;
};

// Filesystem trouble (missing file, unwritable path, short read).
class IoError : public Error {
public:
    using Error::Error;
};

// Bad magic, unsupported version, checksum or kind mismatch in a container.
class FormatError : public Error {
public:
    using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
public:
    using Error::Error;
};

} // namespace kandistill
