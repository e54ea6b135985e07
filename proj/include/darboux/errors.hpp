#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace darboux {

/// Base class of every error raised by the library. All of them denote a
/// numerical failure (as opposed to a verification verdict).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Argument too close to a lattice point of the Weierstrass functions.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, double distance)
      : Error(what), distance_(distance) {}
  double distance() const noexcept { return distance_; }

 private:
  double distance_;
};

class UnsupportedCaseError : public Error {
 public:
  using Error::Error;
};

/// p(u) == p(v) in an addition-law quotient.
class DegeneratePairError : public Error {
 public:
  using Error::Error;
};

class NonRealEnergyError : public Error {
 public:
  using Error::Error;
};

/// A relation that must hold by construction was violated (negative radicand,
/// Riccati residual of an input superpotential too large, ...).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Imaginary part of a superpotential is not constant along the real axis.
class BranchError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A transformation produced poles on the evaluation grid.
class SingularTransformationError : public Error {
 public:
  SingularTransformationError(const std::string& what, std::vector<double> abscissae)
      : Error(what), abscissae_(std::move(abscissae)) {}
  const std::vector<double>& abscissae() const noexcept { return abscissae_; }

 private:
  std::vector<double> abscissae_;
};

class DegenerateGridError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

class IllPosedWindowError : public Error {
 public:
  using Error::Error;
};

class AccuracyError : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace darboux
