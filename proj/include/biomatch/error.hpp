#pragma once

#include <stdexcept>
#include <string>

namespace biomatch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or invalid system configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Failure inside the group arithmetic or the random source.
class CryptoError : public Error {
 public:
  using Error::Error;
};

/// Malformed bytes on the wire or in a file.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A peer violated the message sequence of a session.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Filesystem or socket failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace biomatch
