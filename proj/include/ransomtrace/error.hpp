#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ransomtrace {

// Base class for every error the library raises. `kind()` is a stable
// machine-readable tag (e.g. "BadChecksum") used by the CLI and HTTP layers.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// Transient failure of a chain data source. Callers may retry.
class SourceUnavailable : public Error {
public:
    explicit SourceUnavailable(const std::string& message)
        : Error("SourceUnavailable", message) {}
};

} // namespace ransomtrace
