#pragma once

#include <stdexcept>
#include <string>

namespace fsup {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A crisp value fell outside its variable's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration (scenario, keywords, options).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Request rejected at an API boundary: bad agent, oversized text, clock skew.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class SessionClosedError : public Error {
 public:
  using Error::Error;
};

class PersistenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace fsup
