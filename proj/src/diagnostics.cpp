#include "pursuit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pursuit/errors.hpp"
#include "pursuit/kernels.hpp"

namespace pursuit {

OptimalPartition OptimalPartition::from_support(const std::vector<int>& support,
                                                int n_atoms) {
  OptimalPartition p;
  p.lambda_opt = support;
  std::sort(p.lambda_opt.begin(), p.lambda_opt.end());
  for (int j : p.lambda_opt)
    if (j < 0 || j >= n_atoms)
      throw ParameterError("OptimalPartition: support index out of range");
  return p;
}

std::vector<int> OptimalPartition::psi_indices(int n_atoms) const {
  std::vector<int> out;
  out.reserve(n_atoms - lambda_opt.size());
  for (int j = 0; j < n_atoms; ++j)
    if (!is_optimal(j)) out.push_back(j);
  return out;
}

bool OptimalPartition::is_optimal(int j) const {
  return std::binary_search(lambda_opt.begin(), lambda_opt.end(), j);
}

namespace {

double abs_corr(const Dictionary& d, int j, const RealVector& r) {
  double s = 0.0;
  const auto a = d.atom(j);
  for (int i = 0; i < d.n_measurements(); ++i) s += a[i] * r[i];
  return std::fabs(s);
}

double binomial(int n, int k) {
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v *= static_cast<double>(n - k + i) / i;
  return v;
}

}  // namespace

double greedy_ratio(const Dictionary& d, const RealVector& r,
                    const OptimalPartition& part) {
  double num = 0.0, den = 0.0;
  for (int j = 0; j < d.n_atoms(); ++j) {
    const double m = abs_corr(d, j, r);
    if (part.is_optimal(j))
      den = std::max(den, m);
    else
      num = std::max(num, m);
  }
  if (den == 0.0)
    throw NumericalError("greedy_ratio: residual orthogonal to all optimal atoms");
  return num / den;
}

double greedy_ratio_block(const Dictionary& d, const RealVector& r,
                          const OptimalPartition& part, int c,
                          BlockRatioVariant variant,
                          const std::vector<int>& excluded) {
  if (c < 1 || c > d.n_atoms())
    throw ParameterError("greedy_ratio_block: c out of range");
  if (binomial(d.n_atoms(), c) > 1e6)
    throw ParameterError("greedy_ratio_block: instance too large for enumeration");
  std::vector<char> ex(d.n_atoms(), 0);
  for (int j : excluded) ex[j] = 1;

  std::vector<double> psi_mags, opt_mags;
  for (int j = 0; j < d.n_atoms(); ++j) {
    if (ex[j]) continue;
    const double m = abs_corr(d, j, r);
    if (part.is_optimal(j))
      opt_mags.push_back(m);
    else
      psi_mags.push_back(m);
  }
  if (opt_mags.empty() ||
      *std::max_element(opt_mags.begin(), opt_mags.end()) == 0.0)
    throw NumericalError(
        "greedy_ratio_block: residual orthogonal to all optimal atoms");
  std::sort(psi_mags.begin(), psi_mags.end(), std::greater<double>());
  std::sort(opt_mags.begin(), opt_mags.end(), std::greater<double>());

  // Subset l2 norms over sorted magnitudes: the maximizing size-s subset is
  // the top s, the minimizing one the bottom s.
  const int smax = std::min<int>(c, std::min(psi_mags.size(), opt_mags.size()));
  double best = 0.0;
  double num_sq = 0.0;
  for (int s = 1; s <= smax; ++s) {
    num_sq += psi_mags[s - 1] * psi_mags[s - 1];
    double den_sq = 0.0;
    if (variant == BlockRatioVariant::pair_supremum) {
      for (int i = 0; i < s; ++i) {
        const double m = opt_mags[opt_mags.size() - 1 - i];
        den_sq += m * m;
      }
    } else {
      for (int i = 0; i < s; ++i) den_sq += opt_mags[i] * opt_mags[i];
    }
    if (den_sq == 0.0) {
      if (num_sq > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    best = std::max(best, std::sqrt(num_sq / den_sq));
  }
  return best;
}

double lemma1_quantity(const Dictionary& d, const OptimalPartition& part,
                       const std::vector<int>& selected_nonoptimal,
                       const std::vector<int>& selected_optimal) {
  const int k = static_cast<int>(part.lambda_opt.size());
  std::vector<char> sel_opt(d.n_atoms(), 0);
  for (int j : selected_optimal) sel_opt[j] = 1;
  std::vector<int> pi_rows;  // row indices of X^+ for unselected optimal columns
  for (int i = 0; i < k; ++i)
    if (!sel_opt[part.lambda_opt[i]]) pi_rows.push_back(i);
  if (pi_rows.empty())
    throw ParameterError("lemma1_quantity: Pi is empty (all optimal selected)");

  std::vector<int> x_cols = part.lambda_opt;
  for (int j : selected_nonoptimal) {
    if (part.is_optimal(j))
      throw ParameterError("lemma1_quantity: selected_nonoptimal contains an optimal index");
    x_cols.push_back(j);
  }

  FlopCounter scratch;
  QrFactor qr{DenseMatrix(d.n_measurements(), 0), DenseMatrix(1, 0)};
  for (int j : x_cols) {
    const auto a = d.atom(j);
    qr = qr_append_column(qr.Q, qr.R, RealVector(a.begin(), a.end()), scratch);
  }

  std::vector<char> in_x(d.n_atoms(), 0);
  for (int j : x_cols) in_x[j] = 1;

  const int m = static_cast<int>(x_cols.size());
  double best = 0.0;
  for (int p = 0; p < d.n_atoms(); ++p) {
    if (in_x[p] || part.is_optimal(p)) continue;  // psi ranges over Psi_Jbar
    RealVector h(m);
    for (int q = 0; q < m; ++q)
      h[q] = dot(qr.Q.col(q), d.atom(p), scratch);
    const RealVector coeff = back_substitute(qr.R, h, scratch);
    double l1 = 0.0;
    for (int row : pi_rows) l1 += std::fabs(coeff[row]);
    best = std::max(best, l1);
  }
  return best;
}

double nmse(const SparseSignal& x_true, const SparseSignal& x_est) {
  if (x_true.dim != x_est.dim)
    throw DimensionError("nmse: dimension mismatch");
  const RealVector a = x_true.dense();
  const RealVector b = x_est.dense();
  double err = 0.0, ref = 0.0;
  for (int i = 0; i < x_true.dim; ++i) {
    const double dlt = b[i] - a[i];
    err += dlt * dlt;
    ref += a[i] * a[i];
  }
  if (ref == 0.0) throw ParameterError("nmse: zero reference signal");
  return err / ref;
}

double normalized_residual(const RealVector& y, const Dictionary& d,
                           const SparseSignal& x) {
  if (static_cast<int>(y.size()) != d.n_measurements())
    throw DimensionError("normalized_residual: y length mismatch");
  if (x.dim != d.n_atoms())
    throw DimensionError("normalized_residual: x dimension mismatch");
  const double ynorm = norm2(y);
  if (ynorm == 0.0) throw ParameterError("normalized_residual: zero y");
  RealVector r = y;
  for (std::size_t i = 0; i < x.support.size(); ++i) {
    const auto a = d.atom(x.support[i]);
    for (int row = 0; row < d.n_measurements(); ++row)
      r[row] -= x.values[i] * a[row];
  }
  return norm2(r) / ynorm;
}

ConditionTrace trace_conditions(const Dictionary& d, const RealVector& y,
                                const SparseSignal& x_true,
                                const SolverConfig& cfg) {
  ConditionTrace trace;
  const auto part = OptimalPartition::from_support(x_true.support, d.n_atoms());
  const int k = x_true.sparsity();
  const int c = cfg.block_size;
  const bool rho_c_feasible = binomial(d.n_atoms(), c) <= 1e6;
  std::vector<int> selected_sizes;

  SolverConfig run_cfg = cfg;
  run_cfg.on_iteration = [&](const RealVector& r, const std::vector<int>& selected,
                             int iter) {
    ConditionTraceRow row;
    row.iteration = iter;
    int sel_opt = 0;
    std::vector<int> sel_nonopt;
    for (int j : selected) {
      if (part.is_optimal(j))
        ++sel_opt;
      else
        sel_nonopt.push_back(j);
    }
    row.remaining_optimal = k - sel_opt;
    row.l = std::min(row.remaining_optimal, k - 1);
    row.n = k + static_cast<int>(sel_nonopt.size());
    if (row.l <= d.n_atoms() - 1 && row.n <= d.n_atoms() - 1 && row.n >= 1) {
      auto [ok, sum] = check_cumulative_condition(d, row.l, row.n);
      row.mu_sum = sum;
      row.mu_ok = ok;
    } else {
      row.mu_sum = std::numeric_limits<double>::infinity();
      row.mu_ok = false;
    }
    try {
      row.rho = greedy_ratio(d, r, part);
      row.rho_ok = row.rho < 1.0;
    } catch (const NumericalError&) {
      row.rho = std::numeric_limits<double>::quiet_NaN();
    }
    if (rho_c_feasible) {
      try {
        const double rc = greedy_ratio_block(d, r, part, c,
                                             BlockRatioVariant::pair_supremum,
                                             selected);
        row.rho_c = rc;
        row.rho_c_ok = rc < 1.0;
      } catch (const NumericalError&) {
      }
    }
    selected_sizes.push_back(static_cast<int>(selected.size()));
    trace.rows.push_back(row);
  };

  trace.run = bsr(d, y, run_cfg);

  // Fill per-iteration selection composition from the final order.
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const int from = selected_sizes[i];
    const int to = (i + 1 < selected_sizes.size())
                       ? selected_sizes[i + 1]
                       : static_cast<int>(trace.run.selection_order.size());
    for (int p = from; p < to; ++p) {
      if (part.is_optimal(trace.run.selection_order[p]))
        ++trace.rows[i].picked_optimal;
      else
        ++trace.rows[i].picked_nonoptimal;
    }
  }
  return trace;
}

}  // namespace pursuit
