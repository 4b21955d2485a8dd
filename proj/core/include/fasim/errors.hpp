#ifndef FASIM_ERRORS_HPP
#define FASIM_ERRORS_HPP

#include <stdexcept>

namespace fasim {

/// Bad or inconsistent configuration input.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A scenario that is well-formed but cannot be run (unreachable geometry,
/// search space above the configured cap, ...).
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure at run time (divergence, failed bracketing, ...).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fasim

#endif
