#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace tuplesmith {

// Base class for all library errors. Subclasses map onto the CLI exit-code
// contract: validation/parse -> usage (2), everything else -> internal (3).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A request exceeded the configured sieve capacity. Carries the limit so
// messages and callers can name it.
class CapacityError : public Error {
public:
    CapacityError(const std::string& msg, std::uint64_t limit)
        : Error(msg), limit_(limit) {}

    std::uint64_t limit() const noexcept { return limit_; }

private:
    std::uint64_t limit_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

// A bounded scan found no admissible candidate. Carries the obstruction
// prime of the best (narrowest) inadmissible candidate seen.
class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& msg,
                           std::optional<std::uint64_t> obstruction = {})
        : Error(msg), obstruction_(obstruction) {}

    std::optional<std::uint64_t> obstruction() const noexcept { return obstruction_; }

private:
    std::optional<std::uint64_t> obstruction_;
};

class SearchFailureError : public Error {
public:
    using Error::Error;
};

class IntegrityError : public Error {
public:
    using Error::Error;
};

}  // namespace tuplesmith
