#pragma once

#include <stdexcept>
#include <string>

namespace loxobound {

/// Caller supplied something outside an operation's precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A mathematical domain violation (non-positive coordinate, wrong isometry class, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An invariant that should hold by construction did not; indicates a bug.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace loxobound
