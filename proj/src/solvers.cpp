#include "pursuit/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "pursuit/errors.hpp"
#include "pursuit/kernels.hpp"

namespace pursuit {

SparseSignal SparseSignal::from_dense(const RealVector& x, double zero_tol) {
  SparseSignal s;
  s.dim = static_cast<int>(x.size());
  for (int i = 0; i < s.dim; ++i) {
    if (std::fabs(x[i]) > zero_tol) {
      s.support.push_back(i);
      s.values.push_back(x[i]);
    }
  }
  return s;
}

namespace {

using Clock = std::chrono::steady_clock;

double plain_norm2(const RealVector& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool is_zero_vector(const RealVector& v) {
  for (double x : v)
    if (x != 0.0) return false;
  return true;
}

// Counted correlation scan; returns (index, |corr|) pairs for non-excluded atoms.
std::vector<std::pair<int, double>> scan(const Dictionary& d, const RealVector& r,
                                         const std::vector<char>& excluded,
                                         FlopCounter& ctr) {
  std::vector<std::pair<int, double>> out;
  out.reserve(d.n_atoms());
  for (int j = 0; j < d.n_atoms(); ++j) {
    if (excluded[j]) continue;
    const double c = dot(std::span<const double>(r), d.atom(j), ctr);
    out.emplace_back(j, std::fabs(c));
  }
  return out;
}

int best_atom(const std::vector<std::pair<int, double>>& corr) {
  int best = -1;
  double mag = -1.0;
  for (const auto& [j, m] : corr) {
    if (m > mag) {  // strict: ties keep the lowest index
      mag = m;
      best = j;
    }
  }
  return best;
}

std::vector<int> top_block(std::vector<std::pair<int, double>> corr, int c) {
  std::stable_sort(corr.begin(), corr.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const int take = std::min<int>(c, static_cast<int>(corr.size()));
  std::vector<int> out;
  out.reserve(take);
  for (int i = 0; i < take; ++i) out.push_back(corr[i].first);
  return out;
}

void check_selection_pre(const Dictionary& d, const RealVector& r,
                         const std::vector<int>& excluded) {
  if (static_cast<int>(excluded.size()) >= d.n_atoms())
    throw ParameterError("selection: all atoms excluded");
  if (is_zero_vector(r))
    throw NumericalError("selection: zero residual");
}

std::vector<char> mask_of(const Dictionary& d, const std::vector<int>& excluded) {
  std::vector<char> m(d.n_atoms(), 0);
  for (int j : excluded) {
    if (j < 0 || j >= d.n_atoms())
      throw ParameterError("selection: excluded index out of range");
    m[j] = 1;
  }
  return m;
}

// Shared per-run bookkeeping: thresholds, halting, per-iteration records.
struct Run {
  Run(const Dictionary& d, const RealVector& y, const SolverConfig& cfg,
      bool blocked)
      : d(d), y(y), cfg(cfg) {
    if (static_cast<int>(y.size()) != d.n_measurements())
      throw DimensionError("solver: y length does not match dictionary rows");
    if (cfg.block_size < 1 || cfg.block_size > d.n_atoms())
      throw ParameterError("solver: block size out of range");
    if (!blocked && cfg.block_size != 1)
      throw ParameterError("solver: this method requires block_size = 1");
    const int n = d.n_measurements();
    const int da = d.n_atoms();
    kappa = cfg.max_iterations > 0 ? std::min(cfg.max_iterations, da)
                                   : std::min(n, da);
    ynorm = plain_norm2(y);
    delta = cfg.residual_threshold >= 0.0 ? cfg.residual_threshold : 1e-9 * ynorm;
    // An already-satisfied threshold means zero iterations, halted by it.
    if (ynorm <= delta) res.halted_by = Halt::threshold;
    if (cfg.stop_support) {
      stop_mask.assign(da, 0);
      for (int j : *cfg.stop_support) {
        if (j < 0 || j >= da)
          throw ParameterError("solver: stop_support index out of range");
        stop_mask[j] = 1;
      }
      stop_total = static_cast<int>(cfg.stop_support->size());
    }
    excluded.assign(da, 0);
    start = Clock::now();
  }

  void note_selected(int j) {
    excluded[j] = 1;
    res.selection_order.push_back(j);
    if (stop_total > 0 && stop_mask[j]) ++stop_hit;
  }

  void begin_iteration(const RealVector& r, int iter) {
    if (cfg.on_iteration) cfg.on_iteration(r, res.selection_order, iter);
    kern = KernelFlops{};
  }

  void record_iteration(double rnorm) {
    IterationRecord rec;
    rec.residual_norm = rnorm;
    rec.cumulative_flops = res.flops.total();
    rec.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
    rec.kernels = kern;
    res.per_iteration.push_back(rec);
    ++res.iterations_used;
  }

  // Returns true when the run should stop after this iteration.
  bool should_halt(double rnorm) {
    if (stop_total > 0 && stop_hit >= stop_total) {
      res.halted_by = Halt::support_found;
      return true;
    }
    if (rnorm <= delta) {
      res.halted_by = Halt::threshold;
      return true;
    }
    return false;
  }

  void finish(const RealVector& coeffs_in_selection_order) {
    RealVector x(d.n_atoms(), 0.0);
    for (std::size_t i = 0; i < res.selection_order.size(); ++i)
      x[res.selection_order[i]] = coeffs_in_selection_order[i];
    res.coefficients = SparseSignal::from_dense(x);
    res.coefficients.dim = d.n_atoms();
  }

  DenseMatrix selected_columns() const {
    DenseMatrix a(d.n_measurements(),
                  static_cast<int>(res.selection_order.size()));
    for (std::size_t i = 0; i < res.selection_order.size(); ++i)
      a.set_col(static_cast<int>(i), d.atom(res.selection_order[i]));
    return a;
  }

  const Dictionary& d;
  const RealVector& y;
  SolverConfig cfg;
  int kappa = 0;
  double delta = 0.0;
  double ynorm = 0.0;
  std::vector<char> excluded;
  std::vector<char> stop_mask;
  int stop_total = 0;
  int stop_hit = 0;
  SolverResult res;
  KernelFlops kern;
  Clock::time_point start;
};

// Residual r = y - A b plus its norm, counted into the residual kernel.
double recompute_residual(Run& run, const DenseMatrix& a, const RealVector& b,
                          RealVector& r) {
  const std::uint64_t before = run.res.flops.total();
  r = axpy_update(run.y, b, a, run.res.flops);
  const double rnorm = std::sqrt(dot(r, r, run.res.flops));
  run.kern.residual += run.res.flops.total() - before;
  return rnorm;
}

}  // namespace

int select_atom(const Dictionary& d, const RealVector& r,
                const std::vector<int>& excluded) {
  check_selection_pre(d, r, excluded);
  FlopCounter scratch;
  return best_atom(scan(d, r, mask_of(d, excluded), scratch));
}

std::vector<int> select_block(const Dictionary& d, const RealVector& r,
                              const std::vector<int>& excluded, int c) {
  if (c < 1) throw ParameterError("select_block: block size must be positive");
  check_selection_pre(d, r, excluded);
  FlopCounter scratch;
  return top_block(scan(d, r, mask_of(d, excluded), scratch), c);
}

SolverResult omp_naive(const Dictionary& d, const RealVector& y,
                       const SolverConfig& cfg) {
  Run run(d, y, cfg, /*blocked=*/false);
  RealVector r = y;
  double rnorm = run.ynorm;
  RealVector b;
  for (int t = 1; t <= run.kappa && rnorm > run.delta; ++t) {
    run.begin_iteration(r, t);
    std::uint64_t mark = run.res.flops.total();
    const int j = best_atom(scan(d, r, run.excluded, run.res.flops));
    run.kern.selection += run.res.flops.total() - mark;
    run.note_selected(j);

    const DenseMatrix a = run.selected_columns();
    mark = run.res.flops.total();
    try {
      b = solve_small_ls(a, y, &run.res.flops);
    } catch (const RankDeficiencyError& e) {
      run.res.selection_order.pop_back();
      run.finish(b);
      throw SolverRankError(e.what(), e.column(), run.res);
    }
    run.kern.least_squares += run.res.flops.total() - mark;

    rnorm = recompute_residual(run, a, b, r);
    run.record_iteration(rnorm);
    if (run.should_halt(rnorm)) break;
  }
  run.finish(b);
  return run.res;
}

SolverResult omp_qr(const Dictionary& d, const RealVector& y,
                    const SolverConfig& cfg) {
  Run run(d, y, cfg, /*blocked=*/false);
  RealVector r = y;
  double rnorm = run.ynorm;
  QrFactor qr{DenseMatrix(d.n_measurements(), 0), DenseMatrix()};
  qr.R = DenseMatrix(1, 0);  // placeholder shape for the empty factor
  RealVector h;
  RealVector x;
  for (int t = 1; t <= run.kappa && rnorm > run.delta; ++t) {
    run.begin_iteration(r, t);
    std::uint64_t mark = run.res.flops.total();
    const int j = best_atom(scan(d, r, run.excluded, run.res.flops));
    run.kern.selection += run.res.flops.total() - mark;

    const auto atom = d.atom(j);
    RealVector a(atom.begin(), atom.end());
    mark = run.res.flops.total();
    QrFactor next;
    try {
      next = qr_append_column(qr.Q.cols() == 0 ? DenseMatrix(d.n_measurements(), 0) : qr.Q,
                              qr.Q.cols() == 0 ? DenseMatrix(1, 0) : qr.R, a,
                              run.res.flops);
    } catch (const RankDeficiencyError& e) {
      run.finish(x);
      throw SolverRankError(e.what(), e.column(), run.res);
    }
    run.kern.qr_update += run.res.flops.total() - mark;
    qr = std::move(next);
    run.note_selected(j);

    mark = run.res.flops.total();
    h.push_back(dot(qr.Q.col(t - 1), std::span<const double>(y), run.res.flops));
    run.kern.h_update += run.res.flops.total() - mark;

    mark = run.res.flops.total();
    x = back_substitute(qr.R, h, run.res.flops);
    run.kern.back_substitution += run.res.flops.total() - mark;

    const DenseMatrix sel = run.selected_columns();
    rnorm = recompute_residual(run, sel, x, r);
    run.record_iteration(rnorm);
    if (run.should_halt(rnorm)) break;
  }
  run.finish(x);
  return run.res;
}

SolverResult omp_sr(const Dictionary& d, const RealVector& y,
                    const SolverConfig& cfg) {
  Run run(d, y, cfg, /*blocked=*/false);
  const int n = d.n_measurements();
  RealVector r = y;
  double rnorm = run.ynorm;
  RealVector ones(n, 1.0);
  const double zz_ones = static_cast<double>(n);

  std::vector<RealVector> zs;          // per selected atom
  std::vector<double> zz;              // cached <z_l, z_l>
  std::vector<std::vector<double>> gam; // gam[t][l] = gamma_{l,t} over atom z's
  RealVector betas;
  RealVector b;

  for (int t = 1; t <= run.kappa && rnorm > run.delta; ++t) {
    run.begin_iteration(r, t);
    std::uint64_t mark = run.res.flops.total();
    const int j = best_atom(scan(d, r, run.excluded, run.res.flops));
    run.kern.selection += run.res.flops.total() - mark;
    run.note_selected(j);

    const auto atom = d.atom(j);
    RealVector a(atom.begin(), atom.end());

    // gamma_{l,t} regressions against cached <z_l, z_l>
    double g0 = 0.0;
    std::vector<double> g(zs.size());
    mark = run.res.flops.total();
    if (cfg.ones_regressor) g0 = dot(ones, a, run.res.flops);
    for (std::size_t l = 0; l < zs.size(); ++l)
      g[l] = dot(zs[l], a, run.res.flops);
    run.kern.gamma_dot += run.res.flops.total() - mark;
    mark = run.res.flops.total();
    if (cfg.ones_regressor) {
      g0 /= zz_ones;
      run.res.flops.divs += 1;
    }
    for (std::size_t l = 0; l < zs.size(); ++l) {
      g[l] /= zz[l];
      run.res.flops.divs += 1;
    }
    run.kern.gamma_div += run.res.flops.total() - mark;

    // z_t = a_t - sum gamma_{l,t} z_l
    mark = run.res.flops.total();
    RealVector z = a;
    if (cfg.ones_regressor) {
      for (int i = 0; i < n; ++i) z[i] -= g0 * ones[i];
      run.res.flops.mults += n;
      run.res.flops.adds += n;
    }
    for (std::size_t l = 0; l < zs.size(); ++l) {
      for (int i = 0; i < n; ++i) z[i] -= g[l] * zs[l][i];
      run.res.flops.mults += n;
      run.res.flops.adds += n;
    }
    run.kern.z_update += run.res.flops.total() - mark;

    // beta_t = <z,y> / <z,z>; <z,z> computed here, once, and cached
    mark = run.res.flops.total();
    const double zzt = dot(z, z, run.res.flops);
    ++run.res.zz_evaluations;
    if (std::sqrt(zzt) <= kEpsRank) {  // atoms are unit norm
      run.res.selection_order.pop_back();
      run.finish(b);
      throw SolverRankError("omp_sr: atom " + std::to_string(j) +
                                " numerically in span of selected atoms",
                            static_cast<int>(zs.size()), run.res);
    }
    const double beta_t = dot(z, y, run.res.flops) / zzt;
    run.res.flops.divs += 1;
    run.kern.beta += run.res.flops.total() - mark;

    zs.push_back(std::move(z));
    zz.push_back(zzt);
    gam.push_back(std::move(g));
    betas.push_back(beta_t);

    // Backtracking: b_l = beta_l - sum_{k=l+1}^{t} b_k gamma_{l,k}
    mark = run.res.flops.total();
    const int s = t - 1;
    b.assign(t, 0.0);
    b[s] = betas[s];
    for (int l = s - 1; l >= 0; --l) {
      double acc = 0.0;
      for (int k = l + 1; k <= s; ++k) acc += b[k] * gam[k][l];
      b[l] = betas[l] - acc;
      run.res.flops.mults += s - l;
      run.res.flops.adds += s - l;
    }
    run.kern.backtrack += run.res.flops.total() - mark;

    const DenseMatrix sel = run.selected_columns();
    rnorm = recompute_residual(run, sel, b, r);
    run.record_iteration(rnorm);
    if (run.should_halt(rnorm)) break;
  }
  run.finish(b);
  return run.res;
}

SolverResult gomp(const Dictionary& d, const RealVector& y,
                  const SolverConfig& cfg) {
  Run run(d, y, cfg, /*blocked=*/true);
  RealVector r = y;
  double rnorm = run.ynorm;
  RealVector b;
  for (int t = 1; t <= run.kappa && rnorm > run.delta; ++t) {
    if (static_cast<int>(run.res.selection_order.size()) >= d.n_atoms()) break;
    // More than N atoms would make the fit underdetermined; cap the block.
    const int capacity =
        d.n_measurements() - static_cast<int>(run.res.selection_order.size());
    if (capacity <= 0) break;
    run.begin_iteration(r, t);
    std::uint64_t mark = run.res.flops.total();
    const auto block = top_block(scan(d, r, run.excluded, run.res.flops),
                                 std::min(cfg.block_size, capacity));
    run.kern.selection += run.res.flops.total() - mark;
    for (int j : block) run.note_selected(j);

    const DenseMatrix a = run.selected_columns();
    mark = run.res.flops.total();
    try {
      b = solve_small_ls(a, y, &run.res.flops);
    } catch (const RankDeficiencyError& e) {
      for (std::size_t i = 0; i < block.size(); ++i)
        run.res.selection_order.pop_back();
      run.finish(b.empty() ? RealVector{} : b);
      throw SolverRankError(e.what(), e.column(), run.res);
    }
    run.kern.least_squares += run.res.flops.total() - mark;

    rnorm = recompute_residual(run, a, b, r);
    run.record_iteration(rnorm);
    if (run.should_halt(rnorm)) break;
  }
  run.finish(b);
  return run.res;
}

SolverResult bsr(const Dictionary& d, const RealVector& y,
                 const SolverConfig& cfg) {
  Run run(d, y, cfg, /*blocked=*/true);
  const int n = d.n_measurements();
  RealVector r = y;
  double rnorm = run.ynorm;
  RealVector ones(n, 1.0);
  const double zz_ones = static_cast<double>(n);

  struct Block {
    int first_flat = 0;        // flat position of its first atom
    std::vector<int> atoms;    // global atom ids
    QrFactor zqr;              // thin QR of Z block, reused for regressions
  };
  std::vector<Block> blocks;
  std::vector<RealVector> z_flat;              // all z columns in flat order
  std::vector<std::vector<double>> gam_flat;   // gam_flat[p][q]: gamma_{q,p}, q < block start
  RealVector betas;                            // flat beta per selected atom
  RealVector b;

  for (int t = 1; t <= run.kappa && rnorm > run.delta; ++t) {
    if (static_cast<int>(run.res.selection_order.size()) >= d.n_atoms()) break;
    const int capacity =
        d.n_measurements() - static_cast<int>(run.res.selection_order.size());
    if (capacity <= 0) break;
    run.begin_iteration(r, t);
    std::uint64_t mark = run.res.flops.total();
    const auto block_atoms = top_block(scan(d, r, run.excluded, run.res.flops),
                                       std::min(cfg.block_size, capacity));
    run.kern.selection += run.res.flops.total() - mark;

    Block blk;
    blk.first_flat = static_cast<int>(z_flat.size());
    blk.atoms = block_atoms;

    std::vector<RealVector> block_z;
    std::vector<std::vector<double>> block_gam;
    for (int j : block_atoms) {
      const auto atom = d.atom(j);
      RealVector z(atom.begin(), atom.end());
      std::vector<double> gam_j(blk.first_flat, 0.0);

      if (cfg.ones_regressor) {
        mark = run.res.flops.total();
        double g0 = dot(ones, z, run.res.flops) / zz_ones;
        run.res.flops.divs += 1;
        run.kern.gamma_dot += run.res.flops.total() - mark;
        mark = run.res.flops.total();
        for (int i = 0; i < n; ++i) z[i] -= g0 * ones[i];
        run.res.flops.mults += n;
        run.res.flops.adds += n;
        run.kern.z_update += run.res.flops.total() - mark;
      }

      // Regress the raw atom on each earlier block's Z (cross-block
      // orthogonalization); blocks are mutually orthogonal subspaces, so the
      // per-block coefficients compose.
      RealVector a_raw(atom.begin(), atom.end());
      for (const Block& prev : blocks) {
        const int c_prev = static_cast<int>(prev.atoms.size());
        mark = run.res.flops.total();
        RealVector h(c_prev);
        for (int q = 0; q < c_prev; ++q)
          h[q] = dot(prev.zqr.Q.col(q), std::span<const double>(a_raw),
                     run.res.flops);
        RealVector g = back_substitute(prev.zqr.R, h, run.res.flops);
        run.kern.gamma_dot += run.res.flops.total() - mark;
        mark = run.res.flops.total();
        for (int q = 0; q < c_prev; ++q) {
          const auto& zq = z_flat[prev.first_flat + q];
          for (int i = 0; i < n; ++i) z[i] -= g[q] * zq[i];
          gam_j[prev.first_flat + q] = g[q];
        }
        run.res.flops.mults += static_cast<std::uint64_t>(c_prev) * n;
        run.res.flops.adds += static_cast<std::uint64_t>(c_prev) * n;
        run.kern.z_update += run.res.flops.total() - mark;
      }
      block_z.push_back(std::move(z));
      block_gam.push_back(std::move(gam_j));
    }

    // Factor the new block's Z for the block regression and future reuse.
    mark = run.res.flops.total();
    QrFactor zqr{DenseMatrix(n, 0), DenseMatrix(1, 0)};
    try {
      for (const auto& z : block_z)
        zqr = qr_append_column(zqr.Q, zqr.R, z, run.res.flops);
    } catch (const RankDeficiencyError& e) {
      run.finish(b);
      throw SolverRankError(std::string("bsr: block matrix rank-deficient: ") +
                                e.what(),
                            e.column(), run.res);
    }
    blk.zqr = std::move(zqr);
    run.kern.least_squares += run.res.flops.total() - mark;

    // beta_block = Z^+ y via the stored factorization
    mark = run.res.flops.total();
    const int c_now = static_cast<int>(block_atoms.size());
    RealVector h(c_now);
    for (int q = 0; q < c_now; ++q)
      h[q] = dot(blk.zqr.Q.col(q), std::span<const double>(y), run.res.flops);
    RealVector beta_block = back_substitute(blk.zqr.R, h, run.res.flops);
    run.kern.beta += run.res.flops.total() - mark;

    for (int j : block_atoms) run.note_selected(j);
    for (int q = 0; q < c_now; ++q) {
      z_flat.push_back(std::move(block_z[q]));
      gam_flat.push_back(std::move(block_gam[q]));
      betas.push_back(beta_block[q]);
    }
    blocks.push_back(std::move(blk));

    // Backtracking across blocks, latest first:
    // b_i = beta_i - sum_{k>l} sum_{j in block k} b_j gamma_{i,j}
    mark = run.res.flops.total();
    const int total = static_cast<int>(z_flat.size());
    b.assign(total, 0.0);
    for (int q = 0; q < c_now; ++q) b[blocks.back().first_flat + q] = beta_block[q];
    for (int l = static_cast<int>(blocks.size()) - 2; l >= 0; --l) {
      const Block& bl = blocks[l];
      const int next_start = bl.first_flat + static_cast<int>(bl.atoms.size());
      for (int q = 0; q < static_cast<int>(bl.atoms.size()); ++q) {
        const int p = bl.first_flat + q;
        double acc = 0.0;
        for (int pj = next_start; pj < total; ++pj) acc += b[pj] * gam_flat[pj][p];
        b[p] = betas[p] - acc;
        run.res.flops.mults += total - next_start;
        run.res.flops.adds += total - next_start;
      }
    }
    run.kern.backtrack += run.res.flops.total() - mark;

    const DenseMatrix sel = run.selected_columns();
    rnorm = recompute_residual(run, sel, b, r);
    run.record_iteration(rnorm);
    if (run.should_halt(rnorm)) break;
  }
  run.finish(b);
  return run.res;
}

SolverKind solver_kind_from_name(const std::string& name) {
  if (name == "omp_naive" || name == "omp") return SolverKind::omp_naive;
  if (name == "omp_qr") return SolverKind::omp_qr;
  if (name == "omp_sr") return SolverKind::omp_sr;
  if (name == "gomp") return SolverKind::gomp;
  if (name == "bsr") return SolverKind::bsr;
  throw ParameterError("unknown solver: " + name);
}

std::string solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::omp_naive: return "omp_naive";
    case SolverKind::omp_qr: return "omp_qr";
    case SolverKind::omp_sr: return "omp_sr";
    case SolverKind::gomp: return "gomp";
    case SolverKind::bsr: return "bsr";
  }
  throw ParameterError("unknown solver kind");
}

SolverResult run_solver(SolverKind kind, const Dictionary& d, const RealVector& y,
                        const SolverConfig& cfg) {
  switch (kind) {
    case SolverKind::omp_naive: return omp_naive(d, y, cfg);
    case SolverKind::omp_qr: return omp_qr(d, y, cfg);
    case SolverKind::omp_sr: return omp_sr(d, y, cfg);
    case SolverKind::gomp: return gomp(d, y, cfg);
    case SolverKind::bsr: return bsr(d, y, cfg);
  }
  throw ParameterError("unknown solver kind");
}

std::uint64_t cost_model(SolverKind solver, int t, int n_measurements, int n_atoms) {
  if (t < 1 || n_measurements < 1 || t > n_atoms)
    throw ParameterError("cost_model: arguments out of range");
  const std::uint64_t n = n_measurements;
  const std::uint64_t dd = n_atoms;
  const std::uint64_t tt = t;
  switch (solver) {
    case SolverKind::omp_qr:
      return (dd - tt) * (4 * n - 1) + 5 * n + 1 + tt * tt;
    case SolverKind::omp_sr:
      return tt * (2 * n - 1) + 4 * n - 1 + tt * tt;
    default:
      throw ParameterError("cost_model: no published model for this solver");
  }
}

}  // namespace pursuit
