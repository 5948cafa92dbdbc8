#ifndef KALUZA_ERRORS_HPP
#define KALUZA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kaluza {

/// Bad arguments, malformed scenarios, dimension mismatches. CLI exit code 2.
struct input_error : std::runtime_error {
  explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

/// Singular matrices, failed convergence, instability. CLI exit code 3.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kaluza

#endif
