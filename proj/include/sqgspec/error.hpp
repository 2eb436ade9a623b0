// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sqgspec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mode index outside the truncated spectrum.
class IndexError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument value or incompatible operands.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A multiplier or computation produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Missing or unreadable file / directory.
class PathError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Malformed experiment configuration; field() is the dotted key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Time integration produced non-finite coefficients.
class BlowUpError : public Error {
 public:
  BlowUpError(double time, double last_l2, const std::string& what)
      : Error(what), time_(time), last_l2_(last_l2) {}
  double time() const noexcept { return time_; }
  double last_l2() const noexcept { return last_l2_; }

 private:
  double time_;
  double last_l2_;
};

}  // namespace sqgspec
