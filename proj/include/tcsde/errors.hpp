#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace tcsde {

/// Raised when an iterative construction exceeds its configured size budget.
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scheme step produced a non-finite state.
class NumericOverflowError : public std::overflow_error {
public:
    NumericOverflowError(const std::string& what, std::size_t step, std::size_t trajectory = npos)
        : std::overflow_error(what), step_(step), trajectory_(trajectory) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t step() const noexcept { return step_; }
    std::size_t trajectory() const noexcept { return trajectory_; }

private:
    std::size_t step_;
    std::size_t trajectory_;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace tcsde
