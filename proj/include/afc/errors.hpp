#pragma once

#include <stdexcept>
#include <string>

namespace afc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Physical parameters violate their invariants.
class InvalidParams : public Error {
public:
  using Error::Error;
};

/// A tooth shape or line-shape kernel violates its construction invariants.
class InvalidShape : public Error {
public:
  using Error::Error;
};

/// A composite shape exceeds the maximum absorption.
class BoundViolation : public InvalidShape {
public:
  using InvalidShape::InvalidShape;
};

class QuadratureFailure : public Error {
public:
  using Error::Error;
};

/// Phase of F_-1 is undefined because the coefficient vanishes.
class DegenerateShape : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class OptimizationFailure : public Error {
public:
  using Error::Error;
};

class InfeasibleArea : public Error {
public:
  using Error::Error;
};

class MonotonicityViolation : public Error {
public:
  using Error::Error;
};

class GridTooCoarse : public Error {
public:
  using Error::Error;
};

class WindowError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

} // namespace afc
