#include "capbound/bernoulli.hpp"

#include <cmath>
#include <stdexcept>

namespace capbound {

Vec sum_distribution(const BernoulliFamily& family) {
  const int n = static_cast<int>(family.params.size());
  Vec dist = Vec::Zero(n + 1);
  dist[0] = 1.0;
  for (double p : family.params) {
    if (p < 0.0 || p > 1.0) {
      throw std::invalid_argument("bernoulli parameter outside [0, 1]");
    }
    for (int k = n; k >= 0; --k) {
      dist[k] = dist[k] * (1.0 - p) + (k > 0 ? dist[k - 1] * p : 0.0);
    }
  }
  return dist;
}

ExtremalResult extremal_bernoulli(const std::vector<double>& g, int n,
                                  double q, ExtremalDirection direction) {
  if (static_cast<int>(g.size()) != n + 1) {
    throw std::invalid_argument("extremal_bernoulli: g table needs n+1 values");
  }
  if (q < 0.0 || q > n) {
    throw std::invalid_argument("extremal_bernoulli: q outside [0, n]");
  }

  auto expected = [&](const BernoulliFamily& fam) {
    const Vec dist = sum_distribution(fam);
    double e = 0.0;
    for (int k = 0; k <= n; ++k) e += dist[k] * g[k];
    return e;
  };

  const bool minimizing = direction == ExtremalDirection::minimize;
  bool found = false;
  ExtremalResult best;

  const int q_floor = static_cast<int>(std::floor(q));
  for (int m = 0; m <= n; ++m) {
    for (int l = 0; l <= std::min(m, q_floor); ++l) {
      BernoulliFamily fam;
      fam.params.assign(n, 0.0);
      if (m == l) {
        if (std::abs(q - l) > 1e-12) continue;  // needs an integer total
        for (int i = 0; i < l; ++i) fam.params[i] = 1.0;
      } else {
        const double x = (q - l) / (m - l);
        if (x < 0.0 || x > 1.0) continue;
        for (int i = 0; i < l; ++i) fam.params[i] = 1.0;
        for (int i = l; i < m; ++i) fam.params[i] = x;
      }
      const double value = expected(fam);
      const bool better =
          !found || (minimizing ? value < best.value : value > best.value);
      if (better) {
        best.value = value;
        best.params = std::move(fam);
        found = true;
      }
    }
  }
  if (!found) {
    throw std::logic_error("extremal_bernoulli: no structured candidate");
  }
  return best;
}

}  // namespace capbound
