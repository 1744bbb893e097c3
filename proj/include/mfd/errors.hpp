#pragma once

#include <stdexcept>
#include <string>

namespace mfd {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// An iterative or adaptive numerical procedure did not meet its tolerance.
class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input data that cannot support the requested estimate (empty, degenerate, malformed).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require_domain(bool ok, const char* what) {
  if (!ok) throw DomainError(what);
}
}  // namespace detail

}  // namespace mfd
