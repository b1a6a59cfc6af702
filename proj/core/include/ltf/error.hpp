#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ltf {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class InvalidIndex : public Error {
 public:
  using Error::Error;
};

class SingularDesign : public Error {
 public:
  using Error::Error;
};

class NoSelectableModel : public Error {
 public:
  using Error::Error;
};

class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

class ZeroSigma : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// The reference solver ran out of iterations before closing the duality gap.
class OracleBudgetExceeded : public Error {
 public:
  OracleBudgetExceeded(const std::string& what, double gap)
      : Error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

/// Malformed input file. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ltf
