#pragma once

#include <stdexcept>
#include <string>

namespace tpb {

// Argument outside the mathematical domain of a model operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Invalid or malformed configuration (scenario, grid, detection settings).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem failure; message carries the offending path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tpb
