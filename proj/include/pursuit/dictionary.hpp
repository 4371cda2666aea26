#pragma once

#include <map>
#include <span>
#include <vector>

#include "pursuit/matrix.hpp"

namespace pursuit {

// N x d matrix with unit l2 columns (the measurement matrix; columns are atoms).
class Dictionary {
 public:
  explicit Dictionary(DenseMatrix m);

  int n_measurements() const { return matrix_.rows(); }
  int n_atoms() const { return matrix_.cols(); }
  std::span<const double> atom(int j) const { return matrix_.col(j); }
  const DenseMatrix& matrix() const { return matrix_; }

 private:
  DenseMatrix matrix_;
};

struct NormalizedColumns {
  Dictionary dict;
  std::vector<double> factors;  // original column norms, for de-normalization
};

// Scales every column to unit l2 norm. Throws ParameterError naming the
// column index when a column norm is below kEpsRank.
NormalizedColumns normalize_columns(const DenseMatrix& raw);

// mu = max_{j != k} |<phi_j, phi_k>|.
double coherence(const Dictionary& d);

// mu_1(m): for each column psi, the sum of the m largest absolute inner
// products with the other columns, maximized over psi. mu_1(0) = 0.
double cumulative_coherence(const Dictionary& d, int m);

// mu * (2k - 1) < 1 (strict).
bool check_strong_condition(const Dictionary& d, int k);

// Returns (mu_1(l) + mu_1(n) < 1, the sum).
std::pair<bool, double> check_cumulative_condition(const Dictionary& d, int l, int n);

struct RecoveryConditionReport {
  double mu = 0.0;
  std::map<int, double> mu1_values;
  bool strong_ok = false;
  int l = 0;
  int n = 0;
  double weak_sum = 0.0;
};

RecoveryConditionReport build_recovery_report(const Dictionary& d, int k, int l, int n);

}  // namespace pursuit
