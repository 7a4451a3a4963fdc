#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace geomseg {

/// A parameter or observation lies outside the model's domain.
/// `row`/`column` are filled in when the violation comes from loaded data.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what,
                       std::optional<std::size_t> row = std::nullopt,
                       std::optional<std::size_t> column = std::nullopt)
      : std::domain_error(what), row_(row), column_(column) {}

  std::optional<std::size_t> row() const { return row_; }
  std::optional<std::size_t> column() const { return column_; }

 private:
  std::optional<std::size_t> row_;
  std::optional<std::size_t> column_;
};

/// Malformed input: ragged CSV rows, non-numeric fields, empty files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operator was requested for a model it is not defined on
/// (S-type ball tests on Poisson or negative binomial data).
class UnsupportedOperator : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A result file or directory could not be written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroScaleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Engine state violates an internal invariant (e.g. tauhat[t] >= t).
class CorruptionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A solve ran past its wall-clock deadline.
class TimeCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace geomseg
