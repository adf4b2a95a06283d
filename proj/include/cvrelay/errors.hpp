#pragma once

#include <stdexcept>
#include <string>

namespace cvrelay {

/// Input outside an operation's domain (unphysical matrix, unstable device, singular measurement).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its accuracy target or produced an inconsistent value.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, double residual = 0.0)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Scenario file could not be parsed or validated.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string field = {}, int line = 0, int column = 0)
      : std::runtime_error(what), field_(std::move(field)), line_(line), column_(column) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  std::string field_;
  int line_;
  int column_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cvrelay
