#pragma once

#include <stdexcept>
#include <string>

namespace dyadica {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Out-of-range levels, bad config documents.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Operand axes disagree, or a one-axis op received a two-axis function.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The mesh is too coarse for the requested object (Haar function of a
/// finest cell, block deeper than the grid).
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class LevelUnderflowError : public Error {
 public:
  using Error::Error;
};

class SystemMismatchError : public Error {
 public:
  using Error::Error;
};

/// A caller violated a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class InfeasibleExponentError : public Error {
 public:
  using Error::Error;
};

}  // namespace dyadica
