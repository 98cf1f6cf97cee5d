#pragma once
// Error types shared across the library. Each maps to one failure mode of a
// public operation; experiments catch PopulationOverflow per replica, the CLI
// catches ConfigError and reports the offending key.

#include <stdexcept>
#include <string>

namespace crem {

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct MalformedKnots : std::runtime_error {
    explicit MalformedKnots(const std::string& msg) : std::runtime_error(msg) {}
};

struct NotAttained : std::runtime_error {
    explicit NotAttained(const std::string& msg) : std::runtime_error(msg) {}
};

struct InfiniteEndSlope : std::runtime_error {
    explicit InfiniteEndSlope(const std::string& msg) : std::runtime_error(msg) {}
};

struct PopulationOverflow : std::runtime_error {
    explicit PopulationOverflow(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateTree : std::runtime_error {
    explicit DegenerateTree(const std::string& msg) : std::runtime_error(msg) {}
};

struct TooFewSamples : std::runtime_error {
    explicit TooFewSamples(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateDesign : std::runtime_error {
    explicit DegenerateDesign(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    std::string key;
    ConfigError(std::string key_, const std::string& msg)
        : std::runtime_error("config key '" + key_ + "': " + msg), key(std::move(key_)) {}
};

}  // namespace crem
