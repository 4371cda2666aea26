#include "pursuit/workbench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "pursuit/diagnostics.hpp"
#include "pursuit/errors.hpp"

namespace pursuit {

namespace {

double draw_value(std::mt19937_64& rng, ValueDist dist) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  switch (dist) {
    case ValueDist::gaussian: {
      double v;
      do { v = gauss(rng); } while (std::fabs(v) < 1e-12);
      return v;
    }
    case ValueDist::uniform_pm1: {
      double v;
      do { v = unit(rng); } while (std::fabs(v) < 1e-12);
      return v;
    }
    case ValueDist::rademacher:
      return (rng() & 1u) ? 1.0 : -1.0;
  }
  throw ParameterError("unknown value distribution");
}

}  // namespace

Instance gen_instance(const InstanceSpec& spec) {
  const int n = spec.n_measurements;
  const int d = spec.n_atoms;
  const int k = spec.sparsity;
  if (n < 1 || d < 1 || k < 1 || k > d || spec.noise_l2 < 0.0)
    throw ParameterError("gen_instance: invalid spec");
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  DenseMatrix raw = [&] {
    if (spec.dict_kind == DictKind::from_file) return load_csv_matrix(spec.dict_path);
    DenseMatrix m(n, d);
    for (int j = 0; j < d; ++j)
      for (int i = 0; i < n; ++i) m(i, j) = gauss(rng);
    return m;
  }();
  if (raw.rows() != n || raw.cols() != d)
    throw DataError("gen_instance: dictionary file shape does not match spec");
  auto normalized = normalize_columns(raw);

  // Support drawn uniformly without replacement (partial Fisher-Yates).
  std::vector<int> perm(d);
  for (int i = 0; i < d; ++i) perm[i] = i;
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, d - 1);
    std::swap(perm[i], perm[pick(rng)]);
  }
  SparseSignal x;
  x.dim = d;
  x.support.assign(perm.begin(), perm.begin() + k);
  std::sort(x.support.begin(), x.support.end());
  x.values.resize(k);
  for (int i = 0; i < k; ++i) x.values[i] = draw_value(rng, spec.value_dist);

  RealVector y(n, 0.0);
  for (int i = 0; i < k; ++i) {
    const auto a = normalized.dict.atom(x.support[i]);
    for (int row = 0; row < n; ++row) y[row] += x.values[i] * a[row];
  }
  if (spec.noise_l2 > 0.0) {
    RealVector eps(n);
    double nrm;
    do {
      for (int i = 0; i < n; ++i) eps[i] = gauss(rng);
      nrm = norm2(eps);
    } while (nrm == 0.0);
    const double scale = spec.noise_l2 / nrm;
    for (int i = 0; i < n; ++i) y[i] += scale * eps[i];
  }
  return Instance{std::move(normalized.dict), std::move(x), std::move(y)};
}

DenseMatrix load_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.eof()) break;
    std::vector<double> row;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string cell = line.substr(pos, comma - pos);
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0' || !std::isfinite(v))
        throw DataError(path + ": non-numeric cell at line " +
                        std::to_string(lineno));
      row.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError(path + ": ragged row at line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path + ": empty file");
  DenseMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

void save_csv_matrix(const DenseMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  char buf[40];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

RealVector load_csv_vector(const std::string& path) {
  const DenseMatrix m = load_csv_matrix(path);
  RealVector v;
  if (m.cols() == 1) {
    for (int i = 0; i < m.rows(); ++i) v.push_back(m(i, 0));
  } else if (m.rows() == 1) {
    for (int j = 0; j < m.cols(); ++j) v.push_back(m(0, j));
  } else {
    throw DataError(path + ": expected a single row or column");
  }
  return v;
}

void save_csv_vector(const RealVector& v, const std::string& path) {
  DenseMatrix m(static_cast<int>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<int>(i), 0) = v[i];
  save_csv_matrix(m, path);
}

namespace {

int next_pgm_int(std::istream& in, const std::string& path) {
  // Skips whitespace and '#' comment lines between header tokens.
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v;
  if (!(in >> v)) throw DataError(path + ": truncated PGM header");
  return v;
}

}  // namespace

PgmImage load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P2" && magic != "P5")
    throw DataError(path + ": not a P2/P5 PGM file");
  PgmImage img;
  img.width = next_pgm_int(in, path);
  img.height = next_pgm_int(in, path);
  const int maxval = next_pgm_int(in, path);
  if (img.width < 1 || img.height < 1 || maxval < 1 || maxval > 255)
    throw DataError(path + ": unsupported PGM header");
  const std::size_t count =
      static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  img.pixels.resize(count);
  if (magic == "P2") {
    for (std::size_t i = 0; i < count; ++i) {
      int v;
      if (!(in >> v)) throw DataError(path + ": truncated P2 payload");
      img.pixels[i] = static_cast<double>(v) / maxval;
    }
  } else {
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> buf(count);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count)
      throw DataError(path + ": truncated P5 payload");
    for (std::size_t i = 0; i < count; ++i)
      img.pixels[i] = static_cast<double>(buf[i]) / maxval;
  }
  return img;
}

namespace {

BenchReportRow run_cell(const Instance& inst, SolverKind kind, int c,
                        const BenchOptions& opt, const std::string& label) {
  BenchReportRow row;
  row.method = label;
  SolverConfig cfg;
  cfg.block_size = c;
  cfg.residual_threshold = opt.residual_threshold;
  cfg.max_iterations = opt.max_iterations;
  if (opt.oracle_stop) cfg.stop_support = inst.x.support;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    const SolverResult res = run_solver(kind, inst.dict, inst.y, cfg);
    row.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                     .count();
    row.ite = res.iterations_used;
    int found = 0;
    for (int j : res.selection_order)
      if (std::binary_search(inst.x.support.begin(), inst.x.support.end(), j))
        ++found;
    row.found = found;
    row.nmse = nmse(inst.x, res.coefficients);
    row.approx_err = normalized_residual(inst.y, inst.dict, res.coefficients);
    row.flops = res.flops.total();
  } catch (const std::exception& e) {
    row.error = e.what();
    row.nmse = row.approx_err = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

}  // namespace

std::vector<BenchReportRow> run_benchmark(const std::vector<InstanceSpec>& specs,
                                          const BenchOptions& opt) {
  if (specs.empty() || opt.methods.empty())
    throw ParameterError("run_benchmark: empty specs or methods");
  std::vector<BenchReportRow> rows;
  for (const InstanceSpec& spec : specs) {
    const Instance inst = gen_instance(spec);
    for (const std::string& name : opt.methods) {
      const SolverKind kind = solver_kind_from_name(name);
      const bool blocked = kind == SolverKind::gomp || kind == SolverKind::bsr;
      if (!blocked) {
        rows.push_back(run_cell(inst, kind, 1, opt, name));
        continue;
      }
      const std::size_t group_start = rows.size();
      for (int c : opt.c_grid) {
        std::ostringstream label;
        label << name << "(c=" << c << ")";
        rows.push_back(run_cell(inst, kind, c, opt, label.str()));
      }
      // Flag the best-c row (lowest approximation error; ties to smaller c).
      std::size_t best = group_start;
      for (std::size_t i = group_start; i < rows.size(); ++i) {
        if (!rows[i].error.empty()) continue;
        if (!rows[best].error.empty() || rows[i].approx_err < rows[best].approx_err)
          best = i;
      }
      if (rows[best].error.empty()) rows[best].method += "*";
    }
  }
  return rows;
}

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void emit_report(const std::vector<BenchReportRow>& rows, const std::string& path,
                 ReportFormat format) {
  if (rows.empty()) throw ParameterError("emit_report: no rows");
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (format == ReportFormat::csv) {
    out << "method,ite,found,nmse,approx_err,time_s,flops\n";
    for (const auto& r : rows) {
      out << r.method << ',' << r.ite << ',';
      if (r.found >= 0) out << r.found;
      out << ',' << fmt6(r.nmse) << ',' << fmt6(r.approx_err) << ','
          << fmt6(r.time_s) << ',' << r.flops << '\n';
    }
  } else {
    out << "method               ite   found  nmse          approx_err    time_s      flops\n";
    char buf[256];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%-20s %-5d %-6s %-13s %-13s %-11s %llu",
                    r.method.c_str(), r.ite,
                    r.found >= 0 ? std::to_string(r.found).c_str() : "-",
                    fmt6(r.nmse).c_str(), fmt6(r.approx_err).c_str(),
                    fmt6(r.time_s).c_str(),
                    static_cast<unsigned long long>(r.flops));
      out << buf;
      if (!r.error.empty()) out << "  ! " << r.error;
      out << '\n';
    }
  }
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace pursuit
