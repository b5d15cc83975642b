#pragma once

#include <stdexcept>
#include <string>

namespace povm {

// Base for everything the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

// A value failed the invariants of its type (non-Hermitian effect, bad trace...).
class InvariantError : public Error {
public:
    using Error::Error;
};

// Caller broke a precondition (empty input, out of range index, bad epsilon...).
class UsageError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// Register access contract violated (destroyed, or re-measured in single-shot mode).
class RegisterError : public Error {
public:
    using Error::Error;
};

} // namespace povm
