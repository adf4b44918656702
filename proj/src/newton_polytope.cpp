#include "capbound/newton_polytope.hpp"

#include <stdexcept>
#include <vector>

#include "capbound/rational_lp.hpp"

namespace capbound {
namespace {

std::vector<ExponentVec> support_points(const Polynomial& p) {
  std::vector<ExponentVec> pts;
  pts.reserve(p.term_count());
  for (const auto& [e, c] : p.terms()) pts.push_back(e);
  return pts;
}

// Equality system for convex combinations of pts hitting kappa:
// rows are [sum lambda = 1] and the n coordinate equations.
void combination_system(const std::vector<ExponentVec>& pts,
                        const ExponentVec& kappa,
                        std::vector<std::vector<Rational>>* A,
                        std::vector<Rational>* b) {
  const int n = static_cast<int>(kappa.size());
  const std::size_t v = pts.size();
  A->assign(n + 1, std::vector<Rational>(v, Rational(0)));
  b->assign(n + 1, Rational(0));
  for (std::size_t j = 0; j < v; ++j) (*A)[0][j] = 1;
  (*b)[0] = 1;
  for (int i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < v; ++j) (*A)[i + 1][j] = pts[j][i];
    (*b)[i + 1] = kappa[i];
  }
}

// Maximum of delta subject to kappa = sum lambda_j pts_j, sum lambda = 1,
// lambda_j >= delta >= 0. Positive optimum means kappa lies in the
// relative interior of the hull; infeasibility means kappa is outside.
LpResult relint_lp(const std::vector<ExponentVec>& pts,
                   const ExponentVec& kappa) {
  const int n = static_cast<int>(kappa.size());
  const std::size_t v = pts.size();
  // Variables: delta, then slacks s_j with lambda_j = delta + s_j.
  std::vector<std::vector<Rational>> A(n + 1,
                                       std::vector<Rational>(v + 1, Rational(0)));
  std::vector<Rational> b(n + 1, Rational(0));
  A[0][0] = static_cast<long long>(v);
  for (std::size_t j = 0; j < v; ++j) A[0][j + 1] = 1;
  b[0] = 1;
  for (int i = 0; i < n; ++i) {
    Rational col_sum(0);
    for (std::size_t j = 0; j < v; ++j) {
      A[i + 1][j + 1] = pts[j][i];
      col_sum += pts[j][i];
    }
    A[i + 1][0] = col_sum;
    b[i + 1] = kappa[i];
  }
  std::vector<Rational> c(v + 1, Rational(0));
  c[0] = 1;
  return solve_lp_max(A, b, c);
}

bool in_hull(const std::vector<ExponentVec>& pts, const ExponentVec& kappa) {
  if (pts.empty()) return false;
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  combination_system(pts, kappa, &A, &b);
  return lp_feasible(A, b);
}

}  // namespace

NewtonPosition newton_membership(const Polynomial& p,
                                 const ExponentVec& kappa) {
  if (kappa.size() != p.num_vars()) {
    throw std::invalid_argument("newton_membership: dimension mismatch");
  }
  if ((kappa.array() < 0).any()) {
    throw std::invalid_argument("newton_membership: negative exponent");
  }
  const auto pts = support_points(p);
  if (pts.empty()) return NewtonPosition::outside;

  const bool kappa_in_support = p.terms().count(kappa) > 0;
  if (kappa_in_support) {
    std::vector<ExponentVec> others;
    others.reserve(pts.size() - 1);
    for (const auto& v : pts) {
      if (v != kappa) others.push_back(v);
    }
    if (!in_hull(others, kappa)) return NewtonPosition::vertex;
  }

  const LpResult r = relint_lp(pts, kappa);
  if (r.status == LpStatus::infeasible) return NewtonPosition::outside;
  if (r.status != LpStatus::optimal) {
    throw std::logic_error("newton_membership: unexpected LP status");
  }
  return r.objective > 0 ? NewtonPosition::interior : NewtonPosition::boundary;
}

Polynomial face_restriction(const Polynomial& p, const ExponentVec& kappa) {
  const NewtonPosition pos = newton_membership(p, kappa);
  if (pos == NewtonPosition::outside) return Polynomial(p.num_vars());
  if (pos == NewtonPosition::interior) return p;
  if (pos == NewtonPosition::vertex) {
    return Polynomial::monomial(kappa, coefficient(p, kappa));
  }

  // Minimal face containing kappa = support points that take positive
  // weight in some convex representation of kappa.
  const auto pts = support_points(p);
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  combination_system(pts, kappa, &A, &b);
  Polynomial face(p.num_vars());
  for (std::size_t j = 0; j < pts.size(); ++j) {
    std::vector<Rational> c(pts.size(), Rational(0));
    c[j] = 1;
    const LpResult r = solve_lp_max(A, b, c);
    if (r.status == LpStatus::optimal && r.objective > 0) {
      face.add_term(pts[j], coefficient(p, pts[j]));
    }
  }
  return face;
}

const char* to_string(NewtonPosition pos) {
  switch (pos) {
    case NewtonPosition::interior: return "interior";
    case NewtonPosition::boundary: return "boundary";
    case NewtonPosition::vertex: return "vertex";
    case NewtonPosition::outside: return "outside";
  }
  return "unknown";
}

}  // namespace capbound
