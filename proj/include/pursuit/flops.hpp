#pragma once

#include <cstdint>

namespace pursuit {

// Scalar-operation counter. Convention: one flop per scalar multiply,
// add/subtract, or divide; comparisons, copies and square roots cost zero.
struct FlopCounter {
  std::uint64_t mults = 0;
  std::uint64_t adds = 0;
  std::uint64_t divs = 0;

  std::uint64_t total() const { return mults + adds + divs; }

  void reset() { mults = adds = divs = 0; }
};

// Per-iteration flop totals split by solver kernel. Each field is the
// counter delta attributed to that kernel during one iteration; unused
// kernels stay zero. Selection and regression work are kept separate so
// either reading of the published per-iteration totals can be checked.
struct KernelFlops {
  std::uint64_t selection = 0;      // correlation scan over candidate atoms
  std::uint64_t gamma_dot = 0;      // <z_l, a> inner products
  std::uint64_t gamma_div = 0;      // divisions by cached <z_l, z_l>
  std::uint64_t z_update = 0;       // forming the new orthogonalized direction
  std::uint64_t beta = 0;           // <z,z>, <z,y> and the regression divide
  std::uint64_t backtrack = 0;      // triangular coefficient updates
  std::uint64_t residual = 0;       // residual recomputation and its norm
  std::uint64_t qr_update = 0;      // appending a column to the thin QR
  std::uint64_t h_update = 0;       // extending h = Q^T y
  std::uint64_t back_substitution = 0;
  std::uint64_t least_squares = 0;  // dense LS solves (naive OMP, gOMP, BSR blocks)

  std::uint64_t total() const {
    return selection + gamma_dot + gamma_div + z_update + beta + backtrack +
           residual + qr_update + h_update + back_substitution + least_squares;
  }
};

}  // namespace pursuit
