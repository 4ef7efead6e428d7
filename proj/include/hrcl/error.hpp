#pragma once

#include <stdexcept>
#include <string>

namespace hrcl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Vector lengths disagree (plan vs. target vs. global plan, network input, ...).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Invalid or unknown configuration; carries the offending key.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace hrcl
