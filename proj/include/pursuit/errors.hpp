#pragma once

#include <stdexcept>
#include <string>

namespace pursuit {

// Shape mismatch between operands (vector lengths, matrix dims).
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Out-of-range or otherwise invalid argument values.
class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

// File I/O and parse failures (CSV, PGM). Messages carry path/line info.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A factor diagonal (or new orthogonal direction) collapsed below the rank
// tolerance. `column` is the offending column index, -1 when not applicable.
class RankDeficiencyError : public NumericalError {
 public:
  RankDeficiencyError(const std::string& what, int column)
      : NumericalError(what), column_(column) {}
  int column() const { return column_; }

 private:
  int column_;
};

class SingularSystemError : public NumericalError {
 public:
  explicit SingularSystemError(const std::string& what) : NumericalError(what) {}
};

// Relative tolerance separating genuine rank collapse from roundoff.
inline constexpr double kEpsRank = 1e-10;

}  // namespace pursuit
