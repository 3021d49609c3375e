#pragma once

#include <stdexcept>
#include <string>

namespace waveguide {

/// Raised when an argument lies outside the domain where an operation is defined
/// (spectral parameter above threshold, non-positive wavenumber, ...).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Raised when a numerical procedure fails in a way that indicates a bug or a
/// violated internal assumption (e.g. a root bracket that should exist does not).
class InternalError : public std::runtime_error {
 public:
  explicit InternalError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a requested solve falls outside the regime in which it is valid.
class RegimeError : public std::runtime_error {
 public:
  explicit RegimeError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace waveguide
