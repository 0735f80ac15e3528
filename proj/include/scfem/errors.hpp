#ifndef SCFEM_ERRORS_HPP
#define SCFEM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace scfem {

/// Violation of a documented precondition (caller bug).
struct ContractError : std::logic_error {
  explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Numerical failure at runtime (solver breakdown, ellipticity violation).
struct NumericsError : std::runtime_error {
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid run configuration; message lists every violated constraint.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure while reading or writing run artifacts.
struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace scfem

#endif
