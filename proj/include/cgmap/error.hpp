#pragma once

#include <stdexcept>
#include <string>

namespace cgmap {

// Error families map onto distinct CLI exit codes (see cli.hpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad flags, out-of-range configuration values, infeasible generator settings.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Malformed JSON/XML documents. The message carries line or element context.
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally well-formed input that breaks a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Fragment line span outside the file it points at.
class RangeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Topic vectors built over different vocabularies. Always a programming bug.
class VocabularyMismatch : public Error {
public:
    using Error::Error;
};

}  // namespace cgmap
