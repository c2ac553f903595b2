#pragma once

#include <stdexcept>

namespace parax {

/// A model or configuration that violates a precondition.
class InvalidModel : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine ran out of refinement budget. The partial result,
/// when meaningful, travels inside the carrier struct with converged=false;
/// this exception is for the paths that cannot return a partial result.
class NonConvergence : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace parax
