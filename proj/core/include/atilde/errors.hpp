#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace atilde {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unsupported field order, unsupported rank, etc.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Caller violated a precondition (mixed geometries, bad chamber, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed presentation or ball file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A query reaches beyond the radius of a materialized ball.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A boundary quantity was requested on a cylinder that is too shallow.
class DepthError : public Error {
 public:
  using Error::Error;
};

/// Internal inconsistency: inexact division, exchange-table miss, a
/// presentation whose two-letter normal forms are not unique, ...
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Ball construction exceeded its vertex budget.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, std::size_t high_water)
      : Error(what), high_water_(high_water) {}
  std::size_t high_water() const noexcept { return high_water_; }

 private:
  std::size_t high_water_;
};

}  // namespace atilde
