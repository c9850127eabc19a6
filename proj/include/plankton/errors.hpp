#pragma once

#include <stdexcept>
#include <string>

namespace plankton {

/// A numerical inconsistency that must not be silently reconciled, e.g. a
/// predicted/found fixed-point count mismatch or a singular transformation.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace plankton
