#pragma once

#include <stdexcept>
#include <string>

namespace ioncrystal {

/// Malformed or inconsistent input (config files, parameter validation).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Request outside the mathematical domain of a formula or of the potential,
/// e.g. coincident ions, a negative radicand in a closed form, or a
/// structure/spin combination with no analytic solution.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An iterative procedure failed: no convergence, loss of positivity, or a
/// result that cannot be represented (e.g. evolving an unstable model).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace ioncrystal
