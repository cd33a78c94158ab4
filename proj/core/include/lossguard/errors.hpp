#pragma once

#include <stdexcept>
#include <string>

namespace lossguard {

/// Argument outside an operation's domain (bad index, negative length, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A projection was requested onto a branch with zero Born probability.
class ImpossibleBranchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state that should lie in the two-to-four code space does not.
class CodeSpaceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Loss recovery produced a state that is not the expected codeword.
class RecoveryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No Pauli correction restores the code for some (position, outcome).
class DerivationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lossguard
