#pragma once
#include <stdexcept>
#include <string>

namespace torfek {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Enumeration / quadrature budget exceeded; message names the bound.
struct BudgetError : Error {
    explicit BudgetError(const std::string& msg) : Error(msg) {}
};

// Config / usage problems (CLI exit 1).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// An asserted invariant was violated at runtime (CLI exit 2).
struct VerificationError : Error {
    explicit VerificationError(const std::string& msg) : Error(msg) {}
};

}  // namespace torfek
