#pragma once

#include <cstdint>
#include <stdexcept>

#include "capbound/types.hpp"

namespace capbound {

// Permanents over the polytope Mat_n(c) of non-negative matrices with unit
// row sums and column sums c.

// Ryser's formula with Gray-code subset updates; exact up to floating
// rounding for double, exact for Rational. n <= 24 (doubles), n <= 12
// recommended for rationals.
template <typename Scalar>
Scalar permanent(const Matrix<Scalar>& m) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw std::invalid_argument("permanent: not square");
  if (n > 24) throw std::invalid_argument("permanent: n > 24");
  if (n == 0) return Scalar(1);

  Vector<Scalar> row_sums = Vector<Scalar>::Zero(n);
  Scalar total(0);
  std::uint32_t prev = 0;
  const std::uint32_t limit = 1u << n;
  for (std::uint32_t code = 1; code < limit; ++code) {
    const std::uint32_t gray = code ^ (code >> 1);
    const std::uint32_t changed = gray ^ prev;
    int bit = 0;
    while (!((changed >> bit) & 1u)) ++bit;
    if (gray & changed) {
      row_sums += m.col(bit);
    } else {
      row_sums -= m.col(bit);
    }
    prev = gray;

    Scalar prod(1);
    for (int i = 0; i < n; ++i) prod *= row_sums[i];
    int bits = 0;
    for (std::uint32_t v = gray; v != 0; v >>= 1) bits += v & 1u;
    if ((n - bits) % 2 == 0) {
      total += prod;
    } else {
      total -= prod;
    }
  }
  return total;
}

struct ColumnSumSpec {
  int n = 0;
  Vec c;  // strictly positive, summing to n
};

// (1/n) * ones * c^T, the rank-one member of Mat_n(c).
Mat rank_one_candidate(const ColumnSumSpec& spec);

struct UniquenessCheck {
  bool holds = false;
  double lhs = 0.0;     // (n-2)^(n-2) n^(n-1) / (n-1)^(2n-3)
  double rhs = 0.0;     // c_1...c_n / L
  double margin = 0.0;  // lhs - rhs
};

// The sufficient condition for the rank-one matrix to be the unique
// permanent minimizer over Mat_n(c), given any capacity lower bound L > 0.
UniquenessCheck uniqueness_condition(const ColumnSumSpec& spec, double L);

struct MinPerCounterexample {
  Mat sparse;               // bidiagonal member of Mat_{n+1}(c)
  Mat rank_one;             // (1/(n+1)) ones c^T
  Vec c;                    // the shared column sums (length n+1)
  double per_sparse = 0.0;  // n! eps^n, closed form
  double per_rank_one = 0.0;
  double c_deviation = 0.0;  // |c - 1|_1 = 2(1 - eps) < 2
};

// The bidiagonal construction with eps = n^-(1+t) whose permanent drops
// below the rank-one candidate's for large n. Closed forms are
// cross-checked against Ryser for n <= 10.
MinPerCounterexample min_per_counterexample(int n, double t);

struct MinimizeResult {
  Mat matrix;
  double value = 0.0;
  int restarts_used = 0;
};

// Heuristic local search for the permanent minimum over Mat_n(c):
// projected gradient descent (alternating affine projection and clipping)
// followed by a Newton polish in the feasible subspace when the iterate is
// interior. No global claim outside the uniqueness regime. n <= 8.
MinimizeResult minimize_permanent(const ColumnSumSpec& spec,
                                  std::uint64_t seed, int iters = 400,
                                  int restarts = 10);

}  // namespace capbound
