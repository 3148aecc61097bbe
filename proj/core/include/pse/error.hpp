#pragma once

#include <stdexcept>
#include <string>

namespace pse {

/// Raised for malformed inputs, unresolvable ids, and invalid scorer
/// configurations. Front ends map it to a data-error exit code or a 4xx reply.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Subclass for configuration values outside their valid range
/// (e.g. lambda outside [0,1]); lets the HTTP layer answer 422.
class ConfigError : public Error {
  public:
    using Error::Error;
};

}  // namespace pse

namespace pse {

/// A profile variant that leaves no usable text (e.g. every admitted field is
/// revoked or empty) cannot form a user language model.
class EmptyProfileError : public Error {
  public:
    using Error::Error;
};

}  // namespace pse
