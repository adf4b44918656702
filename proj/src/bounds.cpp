#include "capbound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "capbound/capacity.hpp"

namespace capbound {
namespace {

std::vector<double> deviations(const Vec& alpha, const ExponentVec& kappa) {
  if (alpha.size() != kappa.size()) {
    throw std::invalid_argument("deviation profile: length mismatch");
  }
  std::vector<double> d(alpha.size());
  for (int j = 0; j < alpha.size(); ++j) d[j] = alpha[j] - kappa[j];
  return d;
}

void require_valid(const Vec& values, const char* which) {
  for (int k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0)) {
      std::ostringstream os;
      os << which << "_" << (k + 1) << " = " << values[k]
         << " is not positive";
      throw InvalidProfileError(k + 1, os.str());
    }
  }
}

}  // namespace

DeviationProfile profile_from(const Vec& alpha, const ExponentVec& kappa) {
  std::vector<double> d = deviations(alpha, kappa);
  const int n = static_cast<int>(d.size());
  DeviationProfile profile;
  profile.n = n;
  profile.eps.resize(n);
  profile.delta.resize(n);

  std::sort(d.begin(), d.end(), std::greater<double>());
  double top = 0.0;
  for (int k = 0; k < n; ++k) {
    top += d[k];
    profile.eps[k] = 1.0 - top;  // top-k sum: the size-k maximum
  }
  double bottom = 0.0;
  for (int k = 0; k < n; ++k) {
    bottom += d[n - 1 - k];
    profile.delta[k] = 1.0 + bottom;  // bottom-k sum: the size-k minimum
  }
  profile.valid = (profile.eps.array() > 0.0).all() &&
                  (profile.delta.array() > 0.0).all();
  return profile;
}

double two_term_product_min(const Vec& eps, const Vec& delta) {
  const int n = static_cast<int>(eps.size());
  double best = std::numeric_limits<double>::infinity();
  for (int l = 0; l <= n; ++l) {
    double prod = 1.0;
    for (int k = 0; k < l; ++k) prod *= eps[k];
    for (int k = 0; k < n - l; ++k) prod *= delta[k];
    best = std::min(best, prod);
  }
  return best;
}

double two_term_bound(const DeviationProfile& profile) {
  require_valid(profile.eps, "eps");
  require_valid(profile.delta, "delta");
  return two_term_product_min(profile.eps, profile.delta);
}

Vec one_term_eps(const Vec& alpha, const ExponentVec& kappa) {
  const std::vector<double> d = deviations(alpha, kappa);
  const int n = static_cast<int>(d.size());
  // max_{|S| <= k} |sum_S d| is reached either by the k largest positive
  // deviations or by the k most negative ones; mixing signs only cancels.
  std::vector<double> pos, neg;
  for (double v : d) {
    if (v > 0.0) pos.push_back(v);
    if (v < 0.0) neg.push_back(-v);
  }
  std::sort(pos.begin(), pos.end(), std::greater<double>());
  std::sort(neg.begin(), neg.end(), std::greater<double>());
  Vec eps(n);
  double pos_sum = 0.0, neg_sum = 0.0;
  for (int k = 0; k < n; ++k) {
    if (k < static_cast<int>(pos.size())) pos_sum += pos[k];
    if (k < static_cast<int>(neg.size())) neg_sum += neg[k];
    eps[k] = 1.0 - std::max(pos_sum, neg_sum);
  }
  return eps;
}

double one_term_bound(const Vec& alpha, const ExponentVec& kappa) {
  const Vec eps = one_term_eps(alpha, kappa);
  require_valid(eps, "eps");
  double prod = 1.0;
  for (int k = 0; k < eps.size(); ++k) prod *= eps[k];
  return prod;
}

double simple_bound(const Vec& alpha, const ExponentVec& kappa) {
  const std::vector<double> d = deviations(alpha, kappa);
  double l1 = 0.0;
  for (double v : d) l1 += std::abs(v);
  if (!(l1 < 1.0)) {
    throw InvalidProfileError(
        static_cast<int>(d.size()),
        "simple_bound: |kappa - alpha|_1 >= 1");
  }
  return std::pow(1.0 - l1, static_cast<int>(d.size()));
}

double coefficient_bound(const Vec& alpha, const ExponentVec& kappa) {
  return gurvits_prefactor(kappa) * simple_bound(alpha, kappa);
}

}  // namespace capbound
