#pragma once

#include <stdexcept>
#include <string>

namespace qtwt {

/// A request exceeded a configured size limit (qubit count, enumeration size).
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Min-max normalization was asked to map a zero-width cost range.
class DegenerateBoundsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The control branch selected by post-selection carries zero probability mass.
class PostSelectionImpossibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The sampled restart loop exceeded its retry budget. Carries the per-attempt
/// success probability so callers can report how unlikely success was.
class RetriesExhaustedError : public std::runtime_error {
 public:
  RetriesExhaustedError(const std::string& what, double success_probability)
      : std::runtime_error(what), success_probability_(success_probability) {}

  double success_probability() const { return success_probability_; }

 private:
  double success_probability_;
};

/// Syntax or schema error in an input file or grid spec. Location is 1-based
/// when known, 0 when not applicable.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what, int line = 0, int column = 0)
      : std::runtime_error(what), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace qtwt
