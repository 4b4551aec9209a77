#ifndef PCSIM_ERRORS_HPP
#define PCSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pcsim {

// Base class for all simulator errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid argument to a physics routine (out-of-range crystal density, negative temperature, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Device layout cannot be rasterized or violates a structural constraint.
struct GeometryError : Error {
    explicit GeometryError(const std::string& msg) : Error(msg) {}
};

// A linear or nonlinear solve failed to converge.
struct SolverError : Error {
    explicit SolverError(const std::string& msg) : Error(msg) {}
};

// Bad configuration file or inconsistent run setup.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

} // namespace pcsim

#endif
