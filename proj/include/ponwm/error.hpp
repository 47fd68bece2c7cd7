#pragma once

#include <stdexcept>
#include <string>

namespace ponwm {

// Base for every error raised by the library. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Query outside a tabulated wavelength interval.
class OutOfRangeError : public Error {
 public:
  OutOfRangeError(const std::string& what, double lo, double hi)
      : Error(what), lo_(lo), hi_(hi) {}
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_;
  double hi_;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Topology shape does not support the requested operation (no VOA, no splitter, ...).
class StructuralError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, double shortfall_db)
      : Error(what), shortfall_db_(shortfall_db) {}
  double shortfall_db() const { return shortfall_db_; }

 private:
  double shortfall_db_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row) : Error(what), row_(row) {}
  // 1-based data row (header excluded); 0 when the header itself is at fault.
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ponwm
