#pragma once

#include "capbound/polynomial.hpp"
#include "capbound/types.hpp"

namespace capbound {

// Position of a lattice point relative to the Newton polytope (the convex
// hull of the support). "interior" means relative interior, so the
// classification is meaningful for lower-dimensional hulls too. Decided
// exactly with rational linear programming.
enum class NewtonPosition { interior, boundary, vertex, outside };

NewtonPosition newton_membership(const Polynomial& p, const ExponentVec& kappa);

// Terms of p whose exponents lie on the minimal face containing kappa.
// kappa interior -> p itself; vertex -> the single monomial; outside ->
// the zero polynomial.
Polynomial face_restriction(const Polynomial& p, const ExponentVec& kappa);

const char* to_string(NewtonPosition pos);

}  // namespace capbound
