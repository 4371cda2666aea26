#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pursuit/dictionary.hpp"
#include "pursuit/solvers.hpp"

namespace pursuit {

enum class ValueDist { gaussian, uniform_pm1, rademacher };
enum class DictKind { gaussian_normalized, from_file };

struct InstanceSpec {
  int n_measurements = 0;  // N
  int n_atoms = 0;         // d
  int sparsity = 0;        // k
  int block_size = 1;      // c
  double noise_l2 = 0.0;   // target ||eps||_2, exact
  std::uint64_t seed = 0;
  ValueDist value_dist = ValueDist::gaussian;
  DictKind dict_kind = DictKind::gaussian_normalized;
  std::string dict_path;   // for from_file
};

struct Instance {
  Dictionary dict;
  SparseSignal x;
  RealVector y;
};

// Deterministic under seed; y = Phi x + eps with ||eps||_2 calibrated to
// spec.noise_l2 within 1e-12 relative.
Instance gen_instance(const InstanceSpec& spec);

// Rectangular numeric CSV, no header, 17-significant-digit round trip.
DenseMatrix load_csv_matrix(const std::string& path);
void save_csv_matrix(const DenseMatrix& m, const std::string& path);

RealVector load_csv_vector(const std::string& path);  // single column or row
void save_csv_vector(const RealVector& v, const std::string& path);

struct PgmImage {
  int width = 0;
  int height = 0;
  RealVector pixels;  // row-major, scaled to [0, 1]
};

// PGM "P2" (ASCII) or "P5" (binary, maxval <= 255).
PgmImage load_pgm(const std::string& path);

struct BenchReportRow {
  std::string method;   // e.g. "bsr(c=4)"; best-of-grid rows carry a '*' suffix
  int ite = 0;
  int found = -1;       // optimal atoms recovered; -1 when no ground truth
  double nmse = 0.0;
  double approx_err = 0.0;
  double time_s = 0.0;
  std::uint64_t flops = 0;
  std::string error;    // per-row solver failure, empty on success
};

struct BenchOptions {
  std::vector<std::string> methods;  // subset of the five solver names
  std::vector<int> c_grid = {1};     // applied to gomp/bsr only
  bool oracle_stop = false;          // run until the ground-truth support is found
  double residual_threshold = -1.0;
  int max_iterations = 0;
};

// One row per (instance, method, c); wall time measured around the solver
// call only; solver errors are recorded per row, never fatal to the batch.
std::vector<BenchReportRow> run_benchmark(const std::vector<InstanceSpec>& specs,
                                          const BenchOptions& opt);

enum class ReportFormat { csv, pretty };

void emit_report(const std::vector<BenchReportRow>& rows, const std::string& path,
                 ReportFormat format);

}  // namespace pursuit
