#pragma once

#include <vector>

#include "capbound/types.hpp"

namespace capbound {

// Exact rational linear programming in standard form:
//
//   maximize c.x  subject to  A x = b,  x >= 0.
//
// Dense two-phase simplex with Bland's rule, so it terminates on every
// input and the returned solution is a basic feasible point (a vertex of
// the feasible polyhedron). Intended for the small systems that arise
// from Newton polytopes and transportation polytopes.

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Rational objective;
  std::vector<Rational> x;  // basic optimal solution when status == optimal
  // Dual multipliers y with c_j - y.A_j <= 0 for all j and y.b equal to
  // the optimum; one entry per constraint row.
  std::vector<Rational> dual;
};

LpResult solve_lp_max(const std::vector<std::vector<Rational>>& A,
                      const std::vector<Rational>& b,
                      const std::vector<Rational>& c);

// Feasibility of {x >= 0 : A x = b}.
bool lp_feasible(const std::vector<std::vector<Rational>>& A,
                 const std::vector<Rational>& b);

}  // namespace capbound
