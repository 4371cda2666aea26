// Command-line front end: generate instances, run solvers, benchmark,
// and inspect recovery conditions.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pursuit/diagnostics.hpp"
#include "pursuit/errors.hpp"
#include "pursuit/solvers.hpp"
#include "pursuit/workbench.hpp"

namespace {

using namespace pursuit;

ValueDist dist_from_name(const std::string& s) {
  if (s == "gaussian") return ValueDist::gaussian;
  if (s == "uniform") return ValueDist::uniform_pm1;
  if (s == "rademacher") return ValueDist::rademacher;
  throw ParameterError("unknown value distribution: " + s);
}

struct GenArgs {
  int n = 0, d = 0, k = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string dist = "gaussian";
  std::string prefix;
};

int cmd_gen(const GenArgs& a) {
  InstanceSpec spec;
  spec.n_measurements = a.n;
  spec.n_atoms = a.d;
  spec.sparsity = a.k;
  spec.noise_l2 = a.noise;
  spec.seed = a.seed;
  spec.value_dist = dist_from_name(a.dist);
  const Instance inst = gen_instance(spec);
  save_csv_matrix(inst.dict.matrix(), a.prefix + "dict.csv");
  save_csv_vector(inst.y, a.prefix + "y.csv");
  save_csv_vector(inst.x.dense(), a.prefix + "x.csv");
  RealVector supp(inst.x.support.begin(), inst.x.support.end());
  save_csv_vector(supp, a.prefix + "support.csv");
  std::cout << "wrote " << a.prefix << "{dict,y,x,support}.csv  (N=" << a.n
            << " d=" << a.d << " k=" << a.k << " seed=" << a.seed << ")\n";
  return 0;
}

struct RecoverArgs {
  std::string dict_path, signal_path, truth_path, out_path;
  std::string method = "omp_sr";
  int c = 1;
  int max_iter = 0;
  double delta = -1.0;
  bool ones = false;
};

int cmd_recover(const RecoverArgs& a) {
  const DenseMatrix raw = load_csv_matrix(a.dict_path);
  const Dictionary dict = normalize_columns(raw).dict;
  const RealVector y = load_csv_vector(a.signal_path);
  SolverConfig cfg;
  cfg.block_size = a.c;
  cfg.max_iterations = a.max_iter;
  cfg.residual_threshold = a.delta;
  cfg.ones_regressor = a.ones;
  const SolverResult res =
      run_solver(solver_kind_from_name(a.method), dict, y, cfg);
  if (!a.out_path.empty()) save_csv_vector(res.coefficients.dense(), a.out_path);
  std::cout << "method=" << a.method << " iterations=" << res.iterations_used
            << " selected=" << res.selection_order.size()
            << " flops=" << res.flops.total() << "\n";
  std::cout << "approx_err=" << normalized_residual(y, dict, res.coefficients);
  if (!a.truth_path.empty()) {
    const RealVector xt = load_csv_vector(a.truth_path);
    std::cout << " nmse=" << nmse(SparseSignal::from_dense(xt), res.coefficients);
  }
  std::cout << "\n";
  return 0;
}

struct BenchArgs {
  int n = 0, d = 0, k = 0;
  double noise = 0.0;
  int n_seeds = 1;
  std::uint64_t seed0 = 0;
  std::vector<std::string> methods{"omp_sr"};
  std::vector<int> c_grid{1};
  bool oracle_stop = false;
  std::string report = "report.csv";
  std::string format = "csv";
};

int cmd_bench(const BenchArgs& a) {
  std::vector<InstanceSpec> specs;
  for (int s = 0; s < a.n_seeds; ++s) {
    InstanceSpec spec;
    spec.n_measurements = a.n;
    spec.n_atoms = a.d;
    spec.sparsity = a.k;
    spec.noise_l2 = a.noise;
    spec.seed = a.seed0 + static_cast<std::uint64_t>(s);
    specs.push_back(spec);
  }
  BenchOptions opt;
  opt.methods = a.methods;
  opt.c_grid = a.c_grid;
  opt.oracle_stop = a.oracle_stop;
  const auto rows = run_benchmark(specs, opt);
  emit_report(rows, a.report,
              a.format == "pretty" ? ReportFormat::pretty : ReportFormat::csv);
  int failed = 0;
  for (const auto& r : rows)
    if (!r.error.empty()) ++failed;
  std::cout << "wrote " << rows.size() << " rows to " << a.report;
  if (failed) std::cout << " (" << failed << " rows recorded solver errors)";
  std::cout << "\n";
  return 0;
}

struct DiagnoseArgs {
  int n = 0, d = 0, k = 0, c = 1;
  std::uint64_t seed = 0;
  double noise = 0.0;
  std::string trace_out;
};

int cmd_diagnose(const DiagnoseArgs& a) {
  InstanceSpec spec;
  spec.n_measurements = a.n;
  spec.n_atoms = a.d;
  spec.sparsity = a.k;
  spec.noise_l2 = a.noise;
  spec.seed = a.seed;
  const Instance inst = gen_instance(spec);

  const auto report = build_recovery_report(inst.dict, a.k, a.k - 1, a.k);
  std::printf("mu=%.6g  mu(2k-1)=%.6g  strong_ok=%d  mu1(%d)+mu1(%d)=%.6g\n",
              report.mu, report.mu * (2 * a.k - 1), report.strong_ok ? 1 : 0,
              report.l, report.n, report.weak_sum);

  SolverConfig cfg;
  cfg.block_size = a.c;
  const ConditionTrace trace = trace_conditions(inst.dict, inst.y, inst.x, cfg);
  std::printf("%-4s %-10s %-10s %-6s %-10s %-6s %-6s\n", "ite", "rho", "rho_c",
              "|Pi|", "mu_sum", "opt", "nonopt");
  for (const auto& row : trace.rows) {
    std::printf("%-4d %-10.4g ", row.iteration, row.rho);
    if (row.rho_c)
      std::printf("%-10.4g ", *row.rho_c);
    else
      std::printf("%-10s ", "-");
    std::printf("%-6d %-10.4g %-6d %-6d\n", row.remaining_optimal, row.mu_sum,
                row.picked_optimal, row.picked_nonoptimal);
  }
  std::printf("iterations=%d nmse=%.6g\n", trace.run.iterations_used,
              nmse(inst.x, trace.run.coefficients));
  if (!a.trace_out.empty()) {
    std::ofstream out(a.trace_out);
    if (!out) throw DataError("cannot write " + a.trace_out);
    out << "iteration,rho,rho_c,remaining_optimal,l,n,mu_sum,mu_ok,rho_ok,"
           "rho_c_ok,picked_optimal,picked_nonoptimal\n";
    for (const auto& row : trace.rows) {
      out << row.iteration << ',' << row.rho << ',';
      if (row.rho_c) out << *row.rho_c;
      out << ',' << row.remaining_optimal << ',' << row.l << ',' << row.n << ','
          << row.mu_sum << ',' << row.mu_ok << ',' << row.rho_ok << ','
          << row.rho_c_ok << ',' << row.picked_optimal << ','
          << row.picked_nonoptimal << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse recovery workbench"};
  app.require_subcommand(1);

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
  gen->add_option("--measurements,-N", ga.n, "rows of the dictionary")->required();
  gen->add_option("--atoms,-d", ga.d, "columns of the dictionary")->required();
  gen->add_option("--sparsity,-k", ga.k, "nonzeros in the signal")->required();
  gen->add_option("--noise", ga.noise, "exact l2 norm of the additive noise");
  gen->add_option("--seed", ga.seed, "RNG seed");
  gen->add_option("--dist", ga.dist, "gaussian | uniform | rademacher");
  gen->add_option("--out", ga.prefix, "output path prefix")->required();

  RecoverArgs ra;
  auto* rec = app.add_subcommand("recover", "run one solver on files");
  rec->add_option("--dict", ra.dict_path, "dictionary CSV")->required();
  rec->add_option("--signal", ra.signal_path, "measurement vector CSV")->required();
  rec->add_option("--method", ra.method, "omp | omp_qr | omp_sr | gomp | bsr");
  rec->add_option("--block-size,-c", ra.c, "atoms per iteration (gomp/bsr)");
  rec->add_option("--max-iter", ra.max_iter, "iteration budget (0 = min(N,d))");
  rec->add_option("--delta", ra.delta, "residual-norm stopping threshold");
  rec->add_flag("--ones-regressor", ra.ones, "seed the regressor set with the all-ones vector");
  rec->add_option("--truth", ra.truth_path, "ground-truth coefficients CSV (enables nmse)");
  rec->add_option("--out", ra.out_path, "write recovered coefficients CSV");

  BenchArgs ba;
  auto* ben = app.add_subcommand("bench", "benchmark solvers over seeded instances");
  ben->add_option("--measurements,-N", ba.n, "rows")->required();
  ben->add_option("--atoms,-d", ba.d, "columns")->required();
  ben->add_option("--sparsity,-k", ba.k, "nonzeros")->required();
  ben->add_option("--noise", ba.noise, "exact noise l2 norm");
  ben->add_option("--seeds", ba.n_seeds, "number of consecutive seeds");
  ben->add_option("--seed0", ba.seed0, "first seed");
  ben->add_option("--methods", ba.methods, "solver names")->delimiter(',');
  ben->add_option("--c-grid", ba.c_grid, "block sizes for gomp/bsr")->delimiter(',');
  ben->add_flag("--oracle-stop", ba.oracle_stop, "halt once the true support is selected");
  ben->add_option("--report", ba.report, "output path");
  ben->add_option("--format", ba.format, "csv | pretty");

  DiagnoseArgs da;
  auto* dia = app.add_subcommand("diagnose", "recovery-condition trace on a seeded instance");
  dia->add_option("--measurements,-N", da.n, "rows")->required();
  dia->add_option("--atoms,-d", da.d, "columns")->required();
  dia->add_option("--sparsity,-k", da.k, "nonzeros")->required();
  dia->add_option("--block-size,-c", da.c, "block size");
  dia->add_option("--noise", da.noise, "exact noise l2 norm");
  dia->add_option("--seed", da.seed, "RNG seed");
  dia->add_option("--trace-out", da.trace_out, "write the per-iteration trace CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_gen(ga);
    if (rec->parsed()) return cmd_recover(ra);
    if (ben->parsed()) return cmd_bench(ba);
    if (dia->parsed()) return cmd_diagnose(da);
  } catch (const pursuit::ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const pursuit::DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pursuit::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const pursuit::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
