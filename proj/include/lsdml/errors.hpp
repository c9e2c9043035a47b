#pragma once

#include <stdexcept>
#include <string>

namespace lsdml {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coefficient vector, basis or matrix shapes disagree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A point is not in the domain of a basis (e.g. outside an indicator support).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument that is not a shape problem (negative lambda, empty sample, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A Gram matrix or normal-equation system could not be factorized.
class SingularSystem : public Error {
 public:
  SingularSystem(const std::string& what, double condition)
      : Error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// A synthetic design could not be realized as a probability table.
class InfeasibleDesign : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lsdml
