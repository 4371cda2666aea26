#pragma once

#include <optional>
#include <vector>

#include "pursuit/dictionary.hpp"
#include "pursuit/solvers.hpp"

namespace pursuit {

// Partition of the atom index set into the optimal support and the rest.
struct OptimalPartition {
  std::vector<int> lambda_opt;  // ascending optimal indices

  static OptimalPartition from_support(const std::vector<int>& support, int n_atoms);

  std::vector<int> psi_indices(int n_atoms) const;  // complement of lambda_opt
  bool is_optimal(int j) const;
};

// rho(r) = ||Psi^T r||_inf / ||Phi_opt^T r||_inf. Throws NumericalError when
// the denominator vanishes (r orthogonal to every optimal atom).
double greedy_ratio(const Dictionary& d, const RealVector& r,
                    const OptimalPartition& part);

enum class BlockRatioVariant {
  // sup over pairs (Theta1 in Psi, Theta2 in Phi_opt, equal sizes <= c) of
  // the per-pair ratio; the strongest reading (largest value).
  pair_supremum,
  // ratio of the two constrained maxima: max_s (top-s Psi l2) / (top-s opt l2).
  ratio_of_maxima,
};

// Block greedy-choice ratio rho_c by exhaustive subset enumeration, guarded
// by C(d, c) <= 10^6. Atoms in `excluded` (already selected) take part in
// neither side. May return +inf under pair_supremum when some admissible
// denominator subset is orthogonal to r.
double greedy_ratio_block(const Dictionary& d, const RealVector& r,
                          const OptimalPartition& part, int c,
                          BlockRatioVariant variant = BlockRatioVariant::pair_supremum,
                          const std::vector<int>& excluded = {});

// max over psi in Psi_Jbar of || (X^+)_{Pi,:} psi ||_1 where
// X = [Phi_opt | Psi_J] and Pi indexes the not-yet-selected optimal columns.
double lemma1_quantity(const Dictionary& d, const OptimalPartition& part,
                       const std::vector<int>& selected_nonoptimal,
                       const std::vector<int>& selected_optimal = {});

// ||x_est - x_true||_2^2 / ||x_true||_2^2.
double nmse(const SparseSignal& x_true, const SparseSignal& x_est);

// ||y - Phi x||_2 / ||y||_2.
double normalized_residual(const RealVector& y, const Dictionary& d,
                           const SparseSignal& x);

struct ConditionTraceRow {
  int iteration = 0;
  double rho = 0.0;                  // NaN when degenerate
  std::optional<double> rho_c;       // absent when the enumeration guard trips
  int remaining_optimal = 0;         // |Pi| before this iteration's selection
  int l = 0;                         // min(|Pi|, k-1)
  int n = 0;                         // columns in X = [Phi_opt | Psi_J]
  double mu_sum = 0.0;               // mu_1(l) + mu_1(n)
  bool mu_ok = false;                // mu_sum < 1
  bool rho_ok = false;
  bool rho_c_ok = false;
  int picked_optimal = 0;            // composition of this iteration's block
  int picked_nonoptimal = 0;
};

struct ConditionTrace {
  std::vector<ConditionTraceRow> rows;
  SolverResult run;
};

// Runs bsr on (d, y) recording per-iteration condition quantities against the
// ground-truth support of x_true. Records only; asserts nothing.
ConditionTrace trace_conditions(const Dictionary& d, const RealVector& y,
                                const SparseSignal& x_true, const SolverConfig& cfg);

}  // namespace pursuit
