#pragma once

#include <stdexcept>
#include <string>

namespace levi {

// Precondition violated by a physical argument (nonpositive radius, z0 = 0, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Rejected configuration document. key() names the offending field when known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

// Fock-space representation lost more weight than the configured tolerance.
class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed pulse sequence (Measure not last, negative duration, ...).
class SequenceError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace levi
