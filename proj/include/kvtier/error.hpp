#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kvtier {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad argument or configuration supplied by a caller.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Malformed binary input; carries the byte offset where decoding failed.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

// A broken internal invariant. Never expected in a correct build.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace kvtier
