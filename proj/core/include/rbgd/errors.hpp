#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rbgd {

enum class ErrorKind {
  InvalidArgument,
  NumericalFailure,
  DegenerateProjection,
  SingularSystem,
  RootNotBracketed,
  Domain,
  Feasibility,
  RetractionDomain,
  InfeasibleSubproblem,
  InexactSolve,
};

const char* to_string(ErrorKind kind);

/** Base class for every error raised by the library. The kind lets callers
 * (the linesearch in particular) react to a failure class without RTTI. */
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A point left the open domain of a reference function or objective.
class DomainError : public Error {
 public:
  DomainError(std::size_t index, const std::string& what)
      : Error(ErrorKind::Domain, what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// An iterative subproblem solver stopped before meeting its tolerance.
class InexactSolveError : public Error {
 public:
  InexactSolveError(double primal_residual, double dual_residual,
                    const std::string& what)
      : Error(ErrorKind::InexactSolve, what),
        primal_(primal_residual),
        dual_(dual_residual) {}

  double primal_residual() const noexcept { return primal_; }
  double dual_residual() const noexcept { return dual_; }

 private:
  double primal_;
  double dual_;
};

}  // namespace rbgd
