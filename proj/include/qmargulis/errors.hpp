#pragma once

#include <stdexcept>
#include <string>

namespace qmargulis {

/// Bad input: malformed flags, out-of-range parameters, shape mismatches.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A request would exceed a configured resource cap (e.g. group size).
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A search or screen ran out of candidates.
class ExhaustionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Stored data disagrees with what it claims to describe (digest or cached parameter mismatch).
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant failed. Never expected for valid input.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace qmargulis
