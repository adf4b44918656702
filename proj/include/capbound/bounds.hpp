#pragma once

#include <stdexcept>

#include "capbound/polynomial.hpp"
#include "capbound/types.hpp"

namespace capbound {

// Deviation profile of an expectation vector alpha against integer targets
// kappa. With d_j = alpha_j - kappa_j,
//   eps_k   = 1 - max over size-k subsets of sum d_j  (top-k sum),
//   delta_k = 1 + min over size-k subsets of sum d_j  (bottom-k sum).
// The subsets have size exactly k, so neither sequence need be monotone;
// the one-term bound uses the |S| <= k variant, which is.
struct DeviationProfile {
  int n = 0;
  Vec eps;
  Vec delta;
  bool valid = false;  // all entries strictly positive
};

// Raised when a bound is requested for a profile with a non-positive
// entry; carries the first failing subset size.
class InvalidProfileError : public std::domain_error {
 public:
  InvalidProfileError(int subset_size, const std::string& what)
      : std::domain_error(what), subset_size_(subset_size) {}
  int subset_size() const { return subset_size_; }

 private:
  int subset_size_;
};

DeviationProfile profile_from(const Vec& alpha, const ExponentVec& kappa);

// min over 0 <= l <= n of prod_{k<=l} eps_k * prod_{k<=n-l} delta_k.
double two_term_bound(const DeviationProfile& profile);

// Same minimum but with entries allowed to touch zero (used for boundary
// evaluations where the bound legitimately degenerates to 0).
double two_term_product_min(const Vec& eps, const Vec& delta);

// prod_k (1 - max_{|S| <= k} |sum_{j in S}(kappa_j - alpha_j)|).
double one_term_bound(const Vec& alpha, const ExponentVec& kappa);

// The |S| <= k deviation maxima underlying the one-term bound; these are
// nonincreasing in k.
Vec one_term_eps(const Vec& alpha, const ExponentVec& kappa);

// (1 - |kappa - alpha|_1)^n; requires |kappa - alpha|_1 < 1.
double simple_bound(const Vec& alpha, const ExponentVec& kappa);

// gurvits_prefactor(kappa) * simple_bound(alpha, kappa).
double coefficient_bound(const Vec& alpha, const ExponentVec& kappa);

// The extremal polynomial
//   prod_i x_i^{kappa_i - 1} * prod_{i<n} (eps x_i + (1-eps) x_{i+1})
//                            * (eps x_n + 1 - eps),
// whose capacity and coefficient at kappa both equal eps^n. Requires
// kappa >= 1 componentwise and eps in (0, 1).
template <typename Scalar>
SparsePolynomial<Scalar> tightness_witness(const ExponentVec& kappa,
                                           const Scalar& eps) {
  const int n = static_cast<int>(kappa.size());
  if (n == 0) throw std::invalid_argument("tightness_witness: empty kappa");
  if (!(eps > Scalar(0)) || !(eps < Scalar(1))) {
    throw std::invalid_argument("tightness_witness: eps outside (0, 1)");
  }
  ExponentVec base = kappa;
  for (int i = 0; i < n; ++i) {
    if (kappa[i] < 1) {
      throw std::invalid_argument("tightness_witness: kappa must be >= 1");
    }
    base[i] -= 1;
  }
  SparsePolynomial<Scalar> p =
      SparsePolynomial<Scalar>::monomial(base, Scalar(1));
  const Scalar one_minus = Scalar(1) - eps;
  for (int i = 0; i + 1 < n; ++i) {
    SparsePolynomial<Scalar> factor(n);
    ExponentVec lo = ExponentVec::Zero(n), hi = ExponentVec::Zero(n);
    lo[i] = 1;
    hi[i + 1] = 1;
    factor.add_term(lo, eps);
    factor.add_term(hi, one_minus);
    p = p * factor;
  }
  SparsePolynomial<Scalar> last(n);
  ExponentVec en = ExponentVec::Zero(n);
  en[n - 1] = 1;
  last.add_term(en, eps);
  last.add_term(ExponentVec::Zero(n), one_minus);
  return p * last;
}

}  // namespace capbound
