#pragma once

#include <optional>

#include "capbound/newton_polytope.hpp"
#include "capbound/polynomial.hpp"
#include "capbound/types.hpp"

namespace capbound {

// capacity(p, kappa) = inf over x > 0 of p(x) / x^kappa. In exponential
// coordinates x = e^y the objective F(y) = log p(e^y) - kappa.y is smooth
// and convex, so the infimum is found by damped Newton when kappa lies in
// the relative interior of the Newton polytope. The remaining positions
// are routed exactly:
//   outside  -> 0 (no positive mass at or beyond kappa),
//   vertex   -> the coefficient of x^kappa,
//   boundary -> the infimum equals the capacity of the face restriction
//               (terms on the minimal face containing kappa); the value is
//               attained only in a limit and no minimizer is reported.

struct CapacityQuery {
  Polynomial p;
  ExponentVec kappa;
  double tol = 1e-9;  // relative, in (0, 1e-2]
};

enum class CapacityStatus {
  converged,        // interior minimum found; minimizer reported
  vertex_shortcut,  // kappa is a vertex: value is the coefficient, exactly
  boundary_limit,   // kappa on a proper face: face-restricted value
  zero_outside,     // kappa outside the Newton polytope: value 0
  iteration_limit,  // stopped at the iteration cap; value is best seen
};

struct CapacityResult {
  double value = 0.0;
  std::optional<Vec> minimizer;  // present iff status == converged
  CapacityStatus status = CapacityStatus::zero_outside;
  int iterations = 0;
};

CapacityResult capacity(const CapacityQuery& query);

// Independent check: minimum of p(e^y)/e^{kappa.y} over a uniform grid on
// [-20, 20]^n followed by golden-section sweeps along each axis. Always an
// upper bound on the true capacity. Restricted to num_vars <= 4.
double capacity_oracle(const CapacityQuery& query, int grid_points_per_axis);

// prod_i kappa_i^kappa_i e^{-kappa_i} / kappa_i!  (0^0 = 1), the factor
// that turns a capacity lower bound into a coefficient lower bound.
double gurvits_prefactor(const ExponentVec& kappa);

// Doubly exponential comparison baseline:
// eps^(2^n) * prod_{i=2..n} 1/(max{kappa_i, kappa_1+..+kappa_{i-1}} + 1).
double kko_doubly_exp_bound(double eps, const ExponentVec& kappa);

const char* to_string(CapacityStatus status);

}  // namespace capbound
