#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "capbound/polynomial.hpp"
#include "capbound/types.hpp"

namespace capbound {

// A d x (n+1) non-negative matrix with unit row sums. Column j < n carries
// variable x_j, the last column the constant term; the first n column sums
// are the gradient vector alpha of the associated polynomial
//
//   phi(M)(x) = prod_i ( m_{i,n} + sum_{j<n} m_{i,j} x_j ).
//
// Row count zero is allowed (the empty product, identically 1).
class RowStochasticMatrix {
 public:
  explicit RowStochasticMatrix(Mat entries);

  int rows() const { return static_cast<int>(entries_.rows()); }
  int num_vars() const { return static_cast<int>(entries_.cols()) - 1; }
  const Mat& entries() const { return entries_; }

  Vec column_sums() const { return entries_.colwise().sum(); }
  Vec alpha() const { return column_sums().head(num_vars()); }

 private:
  Mat entries_;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// Row sums ~ 1 and column sums ~ (alpha, d - |alpha|_1) within atol.
// The raw overload accepts arbitrary matrices so that broken inputs can be
// diagnosed rather than rejected at construction.
ValidationReport validate(const Mat& entries, const Vec& alpha, double atol);
ValidationReport validate(const RowStochasticMatrix& m, const Vec& alpha,
                          double atol);

// Expanded phi(M); throws std::length_error beyond term_cap terms.
Polynomial associated_polynomial(const RowStochasticMatrix& m,
                                 std::size_t term_cap = 1000000);

// phi(M) evaluated in product form, never expanded.
double phi_eval(const RowStochasticMatrix& m, const Vec& x);
// log phi(M)(e^y).
double phi_log_eval(const RowStochasticMatrix& m, const Vec& y);

// Extreme point test: the bipartite support graph (rows vs columns, edges
// at exactly non-zero entries) is a forest.
bool is_extreme(const RowStochasticMatrix& m);

// A vertex of the polytope of d x (n+1) non-negative matrices with unit
// row sums and column sums (alpha, d - |alpha|_1), found by minimizing a
// seeded random linear objective with an exact rational simplex. Entries
// below 1e-14 after the exact solve are snapped to zero so the support is
// combinatorially clean.
RowStochasticMatrix random_extreme_point(int n, int d, const Vec& alpha,
                                         std::uint64_t seed);

// The stacked matrix [A; B] whose associated polynomial attains the
// two-term lower bound at kappa: A holds kappa_j - 1 unit rows e_j, B is
// bidiagonal with b_kk = 1 - sum_{j<=k}(kappa_j - alpha_j) and
// b_{k,k+1} = sum_{j<=k}(kappa_j - alpha_j). Requires kappa >= 1,
// kappa - alpha >= 0 and |kappa - alpha|_1 < 1.
RowStochasticMatrix delta_tight_matrix(const ExponentVec& kappa,
                                       const Vec& alpha);

// Deletes column j (kappa_j must be 0) and renormalizes each row i by
// 1/(1 - m_ij); returns the reduced matrix and factor = prod_i(1 - m_ij).
// Then capacity(phi(M), kappa) = factor * capacity(phi(M'), kappa minus j)
// and factor >= 1 - alpha_j.
std::pair<RowStochasticMatrix, double> restrict_zero_column(
    const RowStochasticMatrix& m, int col, const ExponentVec& kappa);

// Column j must have exactly one non-zero entry m_{i0,j} and kappa_j = 1;
// deletes row i0 and column j. capacity(phi(M), kappa) >=
// factor * capacity(phi(M'), kappa minus j) with factor = m_{i0,j}.
std::pair<RowStochasticMatrix, double> peel_leaf_column(
    const RowStochasticMatrix& m, int col, const ExponentVec& kappa);

// Searches for M with |phi(M)(u) - p(u)| <= tol * p(u) over the matrix
// class matching p's gradient. log phi(.)(u) is concave, so its maximum is
// found by barrier ascent and its minimum estimated over sampled vertices;
// a value of p(u) outside that bracket (beyond tol) raises
// NotProductizableError, which is evidence against real stability of p.
struct NotProductizableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RowStochasticMatrix productize(const Polynomial& p, const Vec& u, int d,
                               double tol, std::uint64_t seed = 0);

}  // namespace capbound
