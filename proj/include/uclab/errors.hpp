#pragma once

#include <stdexcept>
#include <string>

namespace uclab {

// Exit-code mapping lives in the CLI: DomainError/SizeError/... -> 2,
// InvariantError -> 3, NumericalError family -> 4.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct SizeError : DomainError {
  using DomainError::DomainError;
};
struct BandError : DomainError {
  using DomainError::DomainError;
};
struct ZeroNormError : DomainError {
  using DomainError::DomainError;
};
struct CoefficientError : DomainError {
  using DomainError::DomainError;
};
struct SupportError : DomainError {
  using DomainError::DomainError;
};
struct SpecError : DomainError {
  using DomainError::DomainError;
};
struct GeometryError : DomainError {
  using DomainError::DomainError;
};

struct InvariantError : std::logic_error {
  using std::logic_error::logic_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct QuadratureError : NumericalError {
  using NumericalError::NumericalError;
};
struct SolveError : NumericalError {
  using NumericalError::NumericalError;
};
struct ResonanceError : NumericalError {
  using NumericalError::NumericalError;
};
struct DegenerateError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace uclab
