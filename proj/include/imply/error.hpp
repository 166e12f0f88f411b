#pragma once

#include <stdexcept>
#include <string>

namespace imply {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a function (e.g. R outside [R_on, R_off]).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration: unknown keys, violated parameter relations, bad units.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The integrator or a linear solve could not produce a result.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A closed-form expression hit a zero denominator.
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// The nodal matrix of a network is singular; carries the offending node.
class TopologyError : public Error {
 public:
  TopologyError(const std::string& what, long node) : Error(what), node_(node) {}
  long node() const noexcept { return node_; }

 private:
  long node_;
};

}  // namespace imply
