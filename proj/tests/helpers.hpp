#pragma once

// Shared test fixtures: seeded random inputs and small independent oracles.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pursuit/dictionary.hpp"
#include "pursuit/matrix.hpp"
#include "pursuit/solvers.hpp"

namespace testutil {

using pursuit::DenseMatrix;
using pursuit::Dictionary;
using pursuit::RealVector;

inline RealVector random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  RealVector v(n);
  for (double& x : v) x = g(rng);
  return v;
}

inline DenseMatrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = g(rng);
  return m;
}

inline Dictionary random_dictionary(std::mt19937_64& rng, int rows, int cols) {
  return pursuit::normalize_columns(random_matrix(rng, rows, cols)).dict;
}

// Orthonormal columns (Gram-Schmidt on a random matrix), then a small
// controlled perturbation; keeps coherence tiny for condition-number tests.
inline Dictionary near_orthonormal_dictionary(std::mt19937_64& rng, int rows,
                                              int cols, double perturb) {
  DenseMatrix m = random_matrix(rng, rows, cols);
  for (int j = 0; j < cols; ++j) {
    auto cj = m.col(j);
    for (int l = 0; l < j; ++l) {
      auto cl = m.col(l);
      double p = 0.0;
      for (int i = 0; i < rows; ++i) p += cl[i] * cj[i];
      for (int i = 0; i < rows; ++i) cj[i] -= p * cl[i];
    }
    const double nrm = pursuit::norm2(cj);
    for (int i = 0; i < rows; ++i) cj[i] /= nrm;
  }
  if (perturb > 0.0) {
    std::normal_distribution<double> g(0.0, perturb);
    for (int j = 0; j < cols; ++j) {
      auto cj = m.col(j);
      for (int i = 0; i < rows; ++i) cj[i] += g(rng);
    }
  }
  return pursuit::normalize_columns(m).dict;
}

inline Dictionary identity_dictionary(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return Dictionary(m);
}

// k distinct indices in [0, d).
inline std::vector<int> random_support(std::mt19937_64& rng, int d, int k) {
  std::vector<int> perm(d);
  for (int i = 0; i < d; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  perm.resize(k);
  std::sort(perm.begin(), perm.end());
  return perm;
}

struct PlantedInstance {
  pursuit::SparseSignal x;
  RealVector y;
};

// Noiseless y = Phi x with coefficient magnitudes in [lo, hi].
inline PlantedInstance plant(std::mt19937_64& rng, const Dictionary& dict, int k,
                             double lo = 0.5, double hi = 2.0) {
  PlantedInstance out;
  out.x.dim = dict.n_atoms();
  out.x.support = random_support(rng, dict.n_atoms(), k);
  std::uniform_real_distribution<double> mag(lo, hi);
  for (int i = 0; i < k; ++i) {
    const double v = mag(rng) * ((rng() & 1u) ? 1.0 : -1.0);
    out.x.values.push_back(v);
  }
  out.y.assign(dict.n_measurements(), 0.0);
  for (int i = 0; i < k; ++i) {
    const auto a = dict.atom(out.x.support[i]);
    for (int row = 0; row < dict.n_measurements(); ++row)
      out.y[row] += out.x.values[i] * a[row];
  }
  return out;
}

// Least squares via long-double normal equations with full-pivot-free
// Gaussian elimination; independent of the library's QR path.
inline RealVector normal_equations_ls(const DenseMatrix& A, const RealVector& y) {
  const int n = A.rows(), m = A.cols();
  std::vector<std::vector<long double>> G(m, std::vector<long double>(m + 1, 0.0L));
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      long double s = 0.0L;
      for (int i = 0; i < n; ++i)
        s += static_cast<long double>(A(i, p)) * A(i, q);
      G[p][q] = s;
    }
    long double s = 0.0L;
    for (int i = 0; i < n; ++i) s += static_cast<long double>(A(i, p)) * y[i];
    G[p][m] = s;
  }
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int row = col + 1; row < m; ++row)
      if (std::fabs(static_cast<double>(G[row][col])) >
          std::fabs(static_cast<double>(G[piv][col])))
        piv = row;
    std::swap(G[col], G[piv]);
    for (int row = col + 1; row < m; ++row) {
      const long double f = G[row][col] / G[col][col];
      for (int q = col; q <= m; ++q) G[row][q] -= f * G[col][q];
    }
  }
  RealVector b(m);
  for (int row = m - 1; row >= 0; --row) {
    long double s = G[row][m];
    for (int q = row + 1; q < m; ++q) s -= G[row][q] * b[q];
    b[row] = static_cast<double>(s / G[row][row]);
  }
  return b;
}

inline double max_abs_diff(const RealVector& a, const RealVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace testutil
