#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pursuit/dictionary.hpp"
#include "pursuit/flops.hpp"
#include "pursuit/matrix.hpp"

namespace pursuit {

// Coefficient vector with explicit support.
struct SparseSignal {
  int dim = 0;
  std::vector<int> support;   // ascending indices in [0, dim)
  std::vector<double> values; // aligned with support, nonzero

  int sparsity() const { return static_cast<int>(support.size()); }

  RealVector dense() const {
    RealVector x(dim, 0.0);
    for (std::size_t i = 0; i < support.size(); ++i) x[support[i]] = values[i];
    return x;
  }

  static SparseSignal from_dense(const RealVector& x, double zero_tol = 0.0);
};

struct SolverConfig {
  int max_iterations = 0;           // 0 -> min(N, d)
  double residual_threshold = -1.0; // absolute on ||r||_2; <0 -> 1e-9 * ||y||_2
  int block_size = 1;               // c; 1 for non-blocked solvers
  bool ones_regressor = false;      // all-ones z_0 joins the orthogonalization
  // Oracle-stop: halt once the given support is fully selected.
  std::optional<std::vector<int>> stop_support;
  // Called at the top of each iteration, before selection, with the current
  // residual and the atoms selected so far.
  std::function<void(const RealVector& r, const std::vector<int>& selected, int iter)>
      on_iteration;
};

enum class Halt { threshold, budget, support_found };

struct IterationRecord {
  double residual_norm = 0.0;
  std::uint64_t cumulative_flops = 0;
  double elapsed_s = 0.0;
  KernelFlops kernels;  // this iteration's per-kernel deltas
};

struct SolverResult {
  SparseSignal coefficients;
  std::vector<int> selection_order;
  std::vector<IterationRecord> per_iteration;
  int iterations_used = 0;
  Halt halted_by = Halt::budget;
  FlopCounter flops;
  std::uint64_t zz_evaluations = 0;  // <z,z> computations (cache probe)
};

// Rank collapse inside a solver; carries what was recovered so far.
class SolverRankError : public RankDeficiencyError {
 public:
  SolverRankError(const std::string& what, int column, SolverResult partial)
      : RankDeficiencyError(what, column), partial_(std::move(partial)) {}
  const SolverResult& partial() const { return partial_; }

 private:
  SolverResult partial_;
};

// Greedy selection: the non-excluded atom maximizing |<phi_j, r>|,
// ties broken by lowest index.
int select_atom(const Dictionary& d, const RealVector& r,
                const std::vector<int>& excluded);

// Top-c magnitudes (the l2-maximizing size-c subset); returns min(c, remaining)
// indices in selection-rank order, deterministic under the tie-break.
std::vector<int> select_block(const Dictionary& d, const RealVector& r,
                              const std::vector<int>& excluded, int c);

SolverResult omp_naive(const Dictionary& d, const RealVector& y, const SolverConfig& cfg);
SolverResult omp_qr(const Dictionary& d, const RealVector& y, const SolverConfig& cfg);
SolverResult omp_sr(const Dictionary& d, const RealVector& y, const SolverConfig& cfg);
SolverResult gomp(const Dictionary& d, const RealVector& y, const SolverConfig& cfg);
SolverResult bsr(const Dictionary& d, const RealVector& y, const SolverConfig& cfg);

enum class SolverKind { omp_naive, omp_qr, omp_sr, gomp, bsr };

SolverKind solver_kind_from_name(const std::string& name);
std::string solver_name(SolverKind kind);

SolverResult run_solver(SolverKind kind, const Dictionary& d, const RealVector& y,
                        const SolverConfig& cfg);

// Closed-form per-iteration flop totals from the published cost model
// (available for omp_qr and omp_sr).
std::uint64_t cost_model(SolverKind solver, int t, int n_measurements, int n_atoms);

}  // namespace pursuit
