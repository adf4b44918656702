#include "capbound/rational_lp.hpp"

#include <cstddef>
#include <stdexcept>

namespace capbound {
namespace {

// Tableau with rows [A | b], a maintained reduced-cost row, and basis
// bookkeeping. Columns 0..n-1 are structural, n.. are the phase-1
// artificials; artificials are barred from re-entering in phase 2.
struct Tableau {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t structural = 0;
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> rhs;
  std::vector<Rational> reduced;  // current reduced costs per column
  std::vector<std::size_t> basis;

  void pivot(std::size_t pr, std::size_t pc) {
    const Rational piv = a[pr][pc];
    for (auto& v : a[pr]) v /= piv;
    rhs[pr] /= piv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == pr) continue;
      const Rational factor = a[r][pc];
      if (factor == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        if (a[pr][j] != 0) a[r][j] -= factor * a[pr][j];
      }
      rhs[r] -= factor * rhs[pr];
    }
    const Rational zfactor = reduced[pc];
    if (zfactor != 0) {
      for (std::size_t j = 0; j < cols; ++j) {
        if (a[pr][j] != 0) reduced[j] -= zfactor * a[pr][j];
      }
    }
    basis[pr] = pc;
  }

  // Rebuilds the reduced-cost row for a fresh objective (obj over all
  // columns): reduced_j = obj_j - sum_r obj[basis_r] a_rj.
  void set_objective(const std::vector<Rational>& obj) {
    reduced = obj;
    for (std::size_t r = 0; r < rows; ++r) {
      const Rational& cb = obj[basis[r]];
      if (cb == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) {
        if (a[r][j] != 0) reduced[j] -= cb * a[r][j];
      }
    }
  }

  // Maximizes the current objective. Dantzig's rule first; after
  // stall_limit pivots it switches to Bland's rule, which cannot cycle.
  // allow_artificial gates the entering candidates. Returns false when
  // unbounded.
  bool run(bool allow_artificial) {
    const std::size_t enter_limit = allow_artificial ? cols : structural;
    const int stall_limit = static_cast<int>(64 + 8 * rows);
    int pivots = 0;
    while (true) {
      std::size_t enter = cols;
      if (pivots < stall_limit) {
        const Rational* best = nullptr;
        for (std::size_t j = 0; j < enter_limit; ++j) {
          if (reduced[j] > 0 && (best == nullptr || reduced[j] > *best)) {
            best = &reduced[j];
            enter = j;
          }
        }
      } else {
        for (std::size_t j = 0; j < enter_limit; ++j) {
          if (reduced[j] > 0) {
            enter = j;
            break;
          }
        }
      }
      if (enter == cols) return true;

      std::size_t leave = rows;
      Rational best_ratio;
      for (std::size_t r = 0; r < rows; ++r) {
        if (a[r][enter] <= 0) continue;
        const Rational ratio = rhs[r] / a[r][enter];
        if (leave == rows || ratio < best_ratio ||
            (ratio == best_ratio && basis[r] < basis[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave == rows) return false;
      pivot(leave, enter);
      ++pivots;
    }
  }
};

}  // namespace

LpResult solve_lp_max(const std::vector<std::vector<Rational>>& A,
                      const std::vector<Rational>& b,
                      const std::vector<Rational>& c) {
  const std::size_t m = A.size();
  const std::size_t n = c.size();
  for (const auto& row : A) {
    if (row.size() != n) throw std::invalid_argument("lp: ragged constraint");
  }
  if (b.size() != m) throw std::invalid_argument("lp: rhs size mismatch");

  Tableau t;
  t.rows = m;
  t.cols = n + m;
  t.structural = n;
  t.a.assign(m, std::vector<Rational>(t.cols, Rational(0)));
  t.rhs.resize(m);
  t.basis.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    const bool flip = b[r] < 0;
    for (std::size_t j = 0; j < n; ++j) t.a[r][j] = flip ? -A[r][j] : A[r][j];
    t.rhs[r] = flip ? -b[r] : b[r];
    t.a[r][n + r] = 1;
    t.basis[r] = n + r;
  }

  // Phase 1: maximize -(sum of artificials).
  {
    std::vector<Rational> phase1(t.cols, Rational(0));
    for (std::size_t j = n; j < t.cols; ++j) phase1[j] = -1;
    t.set_objective(phase1);
    t.run(true);
    Rational infeas(0);
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis[r] >= n) infeas += t.rhs[r];
    }
    if (infeas != 0) return {LpStatus::infeasible, Rational(0), {}};
  }

  // Pivot zero-valued artificials out where possible; rows that cannot
  // pivot are redundant and keep their artificial basic at zero.
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis[r] < n) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (t.a[r][j] != 0) {
        t.pivot(r, j);
        break;
      }
    }
  }

  // Phase 2 over the structural columns only.
  std::vector<Rational> phase2(t.cols, Rational(0));
  for (std::size_t j = 0; j < n; ++j) phase2[j] = c[j];
  t.set_objective(phase2);
  if (!t.run(false)) return {LpStatus::unbounded, Rational(0), {}};

  LpResult result;
  result.status = LpStatus::optimal;
  result.x.assign(n, Rational(0));
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis[r] < n) result.x[t.basis[r]] = t.rhs[r];
  }
  result.objective = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (result.x[j] != 0) result.objective += c[j] * result.x[j];
  }
  return result;
}

bool lp_feasible(const std::vector<std::vector<Rational>>& A,
                 const std::vector<Rational>& b) {
  const std::size_t n = A.empty() ? 0 : A.front().size();
  std::vector<Rational> zero(n, Rational(0));
  return solve_lp_max(A, b, zero).status == LpStatus::optimal;
}

}  // namespace capbound
