#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "pursuit/errors.hpp"

namespace pursuit {

using RealVector = std::vector<double>;

// Dense real matrix, column-major. Zero columns are allowed (an empty
// factor before the first append); rows must be positive.
class DenseMatrix {
 public:
  DenseMatrix() : rows_(0), cols_(0) {}

  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || cols < 0)
      throw DimensionError("DenseMatrix: invalid shape " + std::to_string(rows) +
                           "x" + std::to_string(cols));
    data_.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[idx(i, j)]; }
  double operator()(int i, int j) const { return data_[idx(i, j)]; }

  std::span<double> col(int j) {
    return {data_.data() + static_cast<std::size_t>(j) * rows_,
            static_cast<std::size_t>(rows_)};
  }
  std::span<const double> col(int j) const {
    return {data_.data() + static_cast<std::size_t>(j) * rows_,
            static_cast<std::size_t>(rows_)};
  }

  void set_col(int j, std::span<const double> v) {
    auto c = col(j);
    for (int i = 0; i < rows_; ++i) c[i] = v[i];
  }

  // Appends a column in place.
  void push_col(std::span<const double> v) {
    data_.insert(data_.end(), v.begin(), v.end());
    ++cols_;
  }

  bool all_finite() const {
    for (double x : data_)
      if (!std::isfinite(x)) return false;
    return true;
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * rows_ + i;
  }

  int rows_, cols_;
  std::vector<double> data_;
};

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace pursuit
