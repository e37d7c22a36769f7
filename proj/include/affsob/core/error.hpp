#pragma once

#include <stdexcept>
#include <string>

namespace affsob {

/// Bad input: wrong shapes, out-of-range parameters, malformed data.
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The Gram matrix of a field is singular (the field is constant along some
/// direction), so the affine quantities are zero and transforms do not exist.
class DegenerateError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An operation's stated precondition does not hold for the supplied data.
class PreconditionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An iterative method ran out of iterations.
class ConvergenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument(what);
}

} // namespace detail
} // namespace affsob
