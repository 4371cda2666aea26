#include "pursuit/kernels.hpp"

#include <cmath>
#include <string>

#include "pursuit/errors.hpp"

namespace pursuit {

double dot(std::span<const double> u, std::span<const double> v, FlopCounter& ctr) {
  if (u.size() != v.size() || u.empty())
    throw DimensionError("dot: length mismatch (" + std::to_string(u.size()) +
                         " vs " + std::to_string(v.size()) + ")");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  ctr.mults += u.size();
  ctr.adds += u.size() - 1;
  return s;
}

RealVector axpy_update(const RealVector& r, const RealVector& coeffs,
                       const DenseMatrix& columns, FlopCounter& ctr) {
  if (columns.cols() != static_cast<int>(coeffs.size()))
    throw DimensionError("axpy_update: coefficient count does not match columns");
  if (columns.cols() > 0 && columns.rows() != static_cast<int>(r.size()))
    throw DimensionError("axpy_update: column length does not match residual");
  RealVector out = r;
  const int n = static_cast<int>(r.size());
  for (int l = 0; l < columns.cols(); ++l) {
    const auto c = columns.col(l);
    const double b = coeffs[l];
    for (int i = 0; i < n; ++i) out[i] -= b * c[i];
    ctr.mults += n;
    ctr.adds += n;
  }
  return out;
}

namespace {

// Householder QR of A in place; returns the diagonal of R in `diag` and
// leaves the reflectors in the lower part. y is transformed alongside.
void householder_inplace(DenseMatrix& A, RealVector& y, RealVector& diag,
                         FlopCounter* ctr) {
  const int n = A.rows();
  const int m = A.cols();
  diag.assign(m, 0.0);
  RealVector v(n);
  for (int j = 0; j < m; ++j) {
    const int len = n - j;
    double ss = 0.0;
    for (int i = j; i < n; ++i) ss += A(i, j) * A(i, j);
    if (ctr) { ctr->mults += len; ctr->adds += len - 1; }
    const double normx = std::sqrt(ss);
    const double x0 = A(j, j);
    const double alpha = (x0 >= 0.0) ? -normx : normx;
    diag[j] = alpha;
    for (int i = j; i < n; ++i) v[i] = A(i, j);
    v[j] = x0 - alpha;
    if (ctr) ctr->adds += 1;
    double vtv = 0.0;
    for (int i = j; i < n; ++i) vtv += v[i] * v[i];
    if (ctr) { ctr->mults += len; ctr->adds += len - 1; }
    if (vtv == 0.0) continue;  // column already zero below the diagonal
    auto reflect = [&](auto&& get, auto&& set) {
      double w = 0.0;
      for (int i = j; i < n; ++i) w += v[i] * get(i);
      const double s = 2.0 * w / vtv;
      for (int i = j; i < n; ++i) set(i, get(i) - s * v[i]);
      if (ctr) {
        ctr->mults += 2 * len + 1;
        ctr->adds += 2 * len - 1;
        ctr->divs += 1;
      }
    };
    for (int c = j + 1; c < m; ++c)
      reflect([&](int i) { return A(i, c); }, [&](int i, double x) { A(i, c) = x; });
    reflect([&](int i) { return y[i]; }, [&](int i, double x) { y[i] = x; });
    A(j, j) = alpha;
    for (int i = j + 1; i < n; ++i) A(i, j) = 0.0;
  }
}

void check_rank(const RealVector& diag) {
  double largest = 0.0;
  for (double d : diag) largest = std::max(largest, std::fabs(d));
  for (std::size_t j = 0; j < diag.size(); ++j)
    if (std::fabs(diag[j]) <= kEpsRank * largest)
      throw RankDeficiencyError(
          "solve_small_ls: rank-deficient matrix at column " + std::to_string(j),
          static_cast<int>(j));
}

}  // namespace

RealVector solve_small_ls(const DenseMatrix& A, const RealVector& y,
                          FlopCounter* ctr) {
  if (A.rows() != static_cast<int>(y.size()))
    throw DimensionError("solve_small_ls: row count does not match y");
  if (A.cols() < 1 || A.rows() < A.cols())
    throw DimensionError("solve_small_ls: need rows >= cols >= 1");
  DenseMatrix work = A;
  RealVector h = y;
  RealVector diag;
  householder_inplace(work, h, diag, ctr);
  check_rank(diag);
  const int m = A.cols();
  RealVector b(m, 0.0);
  for (int i = m - 1; i >= 0; --i) {
    double s = h[i];
    for (int k = i + 1; k < m; ++k) s -= work(i, k) * b[k];
    b[i] = s / diag[i];
    if (ctr) {
      ctr->mults += m - 1 - i;
      ctr->adds += m - 1 - i;
      ctr->divs += 1;
    }
  }
  return b;
}

QrFactor qr_append_column(const DenseMatrix& Q, const DenseMatrix& R,
                          const RealVector& a, FlopCounter& ctr) {
  const int n = static_cast<int>(a.size());
  const int t = Q.cols();
  if (t > 0 && Q.rows() != n)
    throw DimensionError("qr_append_column: column length does not match Q");
  if (R.cols() != t || (t > 0 && R.rows() != t))
    throw DimensionError("qr_append_column: R shape does not match Q");

  const double anorm = norm2(a);
  RealVector v = a;
  RealVector h(t, 0.0);
  // MGS with a second pass to hold orthogonality near machine precision.
  for (int pass = 0; pass < 2; ++pass) {
    for (int i = 0; i < t; ++i) {
      const double c = dot(std::span<const double>(v), Q.col(i), ctr);
      h[i] += c;
      if (pass > 0) ctr.adds += 1;
      for (int r = 0; r < n; ++r) v[r] -= c * Q(r, i);
      ctr.mults += n;
      ctr.adds += n;
    }
    if (t == 0) break;
  }
  double vnorm = norm2(v);
  ctr.mults += n;
  ctr.adds += n - 1;
  if (vnorm <= kEpsRank * anorm)
    throw RankDeficiencyError(
        "qr_append_column: new column numerically in span of Q (column " +
            std::to_string(t) + ")",
        t);

  QrFactor out{DenseMatrix(n, t + 1), DenseMatrix(t + 1, t + 1)};
  for (int j = 0; j < t; ++j) {
    out.Q.set_col(j, Q.col(j));
    for (int i = 0; i <= j; ++i) out.R(i, j) = R(i, j);
  }
  for (int r = 0; r < n; ++r) out.Q(r, t) = v[r] / vnorm;
  ctr.divs += n;
  for (int i = 0; i < t; ++i) out.R(i, t) = h[i];
  out.R(t, t) = vnorm;
  return out;
}

RealVector back_substitute(const DenseMatrix& R, const RealVector& h,
                           FlopCounter& ctr) {
  const int t = R.cols();
  if (R.rows() != t || static_cast<int>(h.size()) != t || t < 1)
    throw DimensionError("back_substitute: R must be square and match h");
  double largest = 0.0;
  for (int i = 0; i < t; ++i) largest = std::max(largest, std::fabs(R(i, i)));
  for (int i = 0; i < t; ++i)
    if (std::fabs(R(i, i)) <= kEpsRank * largest)
      throw SingularSystemError("back_substitute: near-zero diagonal at row " +
                                std::to_string(i));
  RealVector x(t, 0.0);
  for (int i = t - 1; i >= 0; --i) {
    double s = h[i];
    for (int k = i + 1; k < t; ++k) s -= R(i, k) * x[k];
    x[i] = s / R(i, i);
    ctr.mults += t - 1 - i;
    ctr.adds += t - 1 - i;
    ctr.divs += 1;
  }
  return x;
}

}  // namespace pursuit
