#pragma once

#include <stdexcept>
#include <string>

namespace maxvol {

/// Base class for all maxvol errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or parameter set (rejected before any solve starts).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Mesh construction failure (too coarse, degenerate spacing, misalignment).
class GridError : public Error {
 public:
  using Error::Error;
};

/// An operation was called before its prerequisites were computed.
class SequencingError : public Error {
 public:
  using Error::Error;
};

/// Linear-algebra or time-stepping failure, with solver context attached.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, int layer = -1, int step = -1)
      : Error(what + (layer >= 0 ? " [layer " + std::to_string(layer) : std::string()) +
              (layer >= 0 && step >= 0 ? ", step " + std::to_string(step) : std::string()) +
              (layer >= 0 ? "]" : std::string())),
        layer(layer),
        step(step) {}

  int layer;
  int step;
};

}  // namespace maxvol
