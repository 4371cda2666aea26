#include "pursuit/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pursuit/errors.hpp"

namespace pursuit {

Dictionary::Dictionary(DenseMatrix m) : matrix_(std::move(m)) {
  if (matrix_.rows() < 1 || matrix_.cols() < 1)
    throw DimensionError("Dictionary: empty matrix");
  if (!matrix_.all_finite())
    throw ParameterError("Dictionary: non-finite entries");
  for (int j = 0; j < matrix_.cols(); ++j) {
    const double nrm = norm2(matrix_.col(j));
    if (std::fabs(nrm - 1.0) > 1e-12)
      throw ParameterError("Dictionary: column " + std::to_string(j) +
                           " is not unit norm (" + std::to_string(nrm) + ")");
  }
}

NormalizedColumns normalize_columns(const DenseMatrix& raw) {
  DenseMatrix out = raw;
  std::vector<double> factors(raw.cols());
  for (int j = 0; j < raw.cols(); ++j) {
    const double nrm = norm2(raw.col(j));
    if (nrm <= kEpsRank)
      throw ParameterError("normalize_columns: degenerate (zero) atom at column " +
                           std::to_string(j));
    factors[j] = nrm;
    auto c = out.col(j);
    for (double& x : c) x /= nrm;
  }
  return {Dictionary(std::move(out)), std::move(factors)};
}

namespace {

// |<phi_j, psi>| for all j != psi_index.
std::vector<double> abs_correlations(const Dictionary& d, int psi_index) {
  const int n = d.n_measurements();
  std::vector<double> out;
  out.reserve(d.n_atoms() - 1);
  const auto psi = d.atom(psi_index);
  for (int j = 0; j < d.n_atoms(); ++j) {
    if (j == psi_index) continue;
    double s = 0.0;
    const auto phi = d.atom(j);
    for (int i = 0; i < n; ++i) s += phi[i] * psi[i];
    out.push_back(std::fabs(s));
  }
  return out;
}

}  // namespace

double coherence(const Dictionary& d) {
  if (d.n_atoms() < 2)
    throw ParameterError("coherence: need at least two atoms");
  double mu = 0.0;
  for (int p = 1; p < d.n_atoms(); ++p) {
    const auto psi = d.atom(p);
    for (int j = 0; j < p; ++j) {
      double s = 0.0;
      const auto phi = d.atom(j);
      for (int i = 0; i < d.n_measurements(); ++i) s += phi[i] * psi[i];
      mu = std::max(mu, std::fabs(s));
    }
  }
  return std::min(mu, 1.0);
}

double cumulative_coherence(const Dictionary& d, int m) {
  if (m == 0) return 0.0;
  if (m < 0 || m > d.n_atoms() - 1)
    throw ParameterError("cumulative_coherence: m out of range [0, d-1]");
  double best = 0.0;
  for (int p = 0; p < d.n_atoms(); ++p) {
    std::vector<double> corr = abs_correlations(d, p);
    std::nth_element(corr.begin(), corr.begin() + (m - 1), corr.end(),
                     std::greater<double>());
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += corr[i];
    best = std::max(best, s);
  }
  return best;
}

bool check_strong_condition(const Dictionary& d, int k) {
  if (k < 1 || k > d.n_atoms())
    throw ParameterError("check_strong_condition: k out of range");
  return coherence(d) * (2.0 * k - 1.0) < 1.0;
}

std::pair<bool, double> check_cumulative_condition(const Dictionary& d, int l, int n) {
  if (l < 0 || l > d.n_atoms() - 1 || n < 1 || n > d.n_atoms() - 1)
    throw ParameterError("check_cumulative_condition: arguments out of range");
  const double sum = cumulative_coherence(d, l) + cumulative_coherence(d, n);
  return {sum < 1.0, sum};
}

RecoveryConditionReport build_recovery_report(const Dictionary& d, int k, int l, int n) {
  RecoveryConditionReport rep;
  rep.mu = coherence(d);
  rep.strong_ok = check_strong_condition(d, k);
  rep.l = l;
  rep.n = n;
  rep.mu1_values[1] = rep.mu;
  if (l >= 1) rep.mu1_values[l] = cumulative_coherence(d, l);
  rep.mu1_values[n] = cumulative_coherence(d, n);
  auto [ok, sum] = check_cumulative_condition(d, l, n);
  (void)ok;
  rep.weak_sum = sum;
  return rep;
}

}  // namespace pursuit
