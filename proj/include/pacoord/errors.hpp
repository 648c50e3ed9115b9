#pragma once

#include <stdexcept>
#include <string>

namespace pacoord {

// Domain violations (point outside X, negative perspective argument, ...)
// are reported with std::domain_error; malformed inputs with
// std::invalid_argument. The types below carry solver outcomes that callers
// are expected to dispatch on.

/// The coordination program has no feasible point.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The principal's optimal utility is unbounded.
class UnboundedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An exhaustive routine was asked to enumerate more cases than its guard allows.
class SizeGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

}  // namespace pacoord
