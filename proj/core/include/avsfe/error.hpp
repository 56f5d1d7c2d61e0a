#pragma once

#include <stdexcept>
#include <string>

namespace avsfe {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user input: bad parameters, inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Mesh construction or refinement failed.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// Factorization or solve failed (non-SPD pivot, singular Gram block, ...).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

#define AVSFE_REQUIRE(cond, ErrorType, msg) \
  do {                                      \
    if (!(cond)) throw ErrorType(msg);      \
  } while (false)

}  // namespace avsfe
