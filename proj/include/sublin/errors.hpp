#ifndef SUBLIN_ERRORS_HPP
#define SUBLIN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sublin {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or mutually inconsistent inputs: weight vectors that do not
/// normalize, vectors attached to the wrong space, non-finite entries.
class structural_error : public error {
 public:
  using error::error;
};

/// A parameter outside its admissible range (p, mu, theta, thresholds).
class domain_error : public error {
 public:
  using error::error;
};

/// A product construction would exceed the atom-count guard.
class size_limit_error : public error {
 public:
  using error::error;
};

/// A theorem hypothesis the caller asked to have enforced does not hold.
class hypothesis_error : public error {
 public:
  using error::error;
};

/// An operation that requires a certified constant was asked to assert
/// with only an estimated one.
class policy_error : public error {
 public:
  using error::error;
};

}  // namespace sublin

#endif
