#pragma once

#include <stdexcept>
#include <string>

namespace layerfit {

/// Raised for every recoverable failure in the library (bad input, geometric
/// degeneracy, solver breakdown). The message names the failed condition.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace layerfit
