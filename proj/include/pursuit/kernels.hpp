#pragma once

#include <span>
#include <utility>

#include "pursuit/flops.hpp"
#include "pursuit/matrix.hpp"

namespace pursuit {

// Inner product with exact flop accounting: N mults, N-1 adds.
double dot(std::span<const double> u, std::span<const double> v, FlopCounter& ctr);

inline double dot(const RealVector& u, const RealVector& v, FlopCounter& ctr) {
  return dot(std::span<const double>(u), std::span<const double>(v), ctr);
}

// Returns r - columns * coeffs. Empty coeffs returns r unchanged at zero cost.
RealVector axpy_update(const RealVector& r, const RealVector& coeffs,
                       const DenseMatrix& columns, FlopCounter& ctr);

// Least-squares minimizer of ||y - A b||_2 via Householder QR.
// Throws RankDeficiencyError when a factor diagonal falls below
// kEpsRank relative to the largest one. The counter, when given,
// accumulates the factorization and solve flops.
RealVector solve_small_ls(const DenseMatrix& A, const RealVector& y,
                          FlopCounter* ctr = nullptr);

struct QrFactor {
  DenseMatrix Q;  // orthonormal columns
  DenseMatrix R;  // upper triangular
};

// Thin-QR update: appends column a to the factorization (Q, R) by modified
// Gram-Schmidt with one reorthogonalization pass.
QrFactor qr_append_column(const DenseMatrix& Q, const DenseMatrix& R,
                          const RealVector& a, FlopCounter& ctr);

// Solves R x = h for upper triangular R. Costs exactly t^2 flops for a
// t x t system: t divides, t(t-1)/2 mults, t(t-1)/2 subtracts.
RealVector back_substitute(const DenseMatrix& R, const RealVector& h,
                           FlopCounter& ctr);

}  // namespace pursuit
