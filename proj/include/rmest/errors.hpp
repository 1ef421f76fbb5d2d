// Error types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace rmest {

/// Input data does not satisfy a representation constraint (bad point,
/// non-tangent vector, malformed sample).
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A geometric operation was requested outside its domain (cut locus,
/// ball radius out of range, antipodal logarithm).
class GeodesicDomainError : public std::runtime_error {
 public:
  explicit GeodesicDomainError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A loss evaluation was requested outside its domain (negative argument,
/// second derivative at an exception point).
class LossDomainError : public std::runtime_error {
 public:
  explicit LossDomainError(const std::string& what)
      : std::runtime_error(what) {}
};

/// A loss was used outside its declared condition class, or the grid
/// verification contradicted the declared class.
class ClassificationError : public std::runtime_error {
 public:
  explicit ClassificationError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Loss not supported by the requested solver (redescending losses in IRLS).
class UnsupportedLossError : public std::runtime_error {
 public:
  explicit UnsupportedLossError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Every IRLS weight vanished, the fixed-point step is undefined.
class DegenerateWeightsError : public std::runtime_error {
 public:
  explicit DegenerateWeightsError(const std::string& what)
      : std::runtime_error(what) {}
};

/// Sample cannot be covered by a ball inside the injectivity radius.
class NotCoverableError : public std::runtime_error {
 public:
  explicit NotCoverableError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace rmest
