#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dckit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IndexOutOfRange : public Error {
public:
    IndexOutOfRange(std::size_t index, std::size_t last)
        : Error("index " + std::to_string(index) + " beyond last stored index " + std::to_string(last)),
          index_(index), last_(last) {}

    std::size_t index() const noexcept { return index_; }
    std::size_t last() const noexcept { return last_; }

private:
    std::size_t index_;
    std::size_t last_;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Raised by the sequence-spec and expression parsers. `position` is a 0-based character offset.
class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& expected)
        : Error("parse error at position " + std::to_string(position) + ": expected " + expected),
          position_(position), expected_(expected) {}

    std::size_t position() const noexcept { return position_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

class DegenerateFit : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class NotWeaklyLogConvex : public Error {
public:
    using Error::Error;
};

class NonzeroConstantTerm : public Error {
public:
    using Error::Error;
};

class CertificateInvalid : public Error {
public:
    using Error::Error;
};

class FlagMismatch : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class OrderTooLarge : public Error {
public:
    using Error::Error;
};

class OrderInsufficient : public Error {
public:
    using Error::Error;
};

class PreconditionFailed : public Error {
public:
    using Error::Error;
};

class UnknownSection : public Error {
public:
    using Error::Error;
};

} // namespace dckit
