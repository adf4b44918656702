#include "capbound/sr.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "capbound/capacity.hpp"
#include "capbound/rng.hpp"

namespace capbound {
namespace {

constexpr double kProbabilityTol = 1e-12;

int popcount(std::uint32_t x) { return std::popcount(x); }

}  // namespace

DiscreteMeasure::DiscreteMeasure(int ground_size,
                                 std::map<std::uint32_t, double> support)
    : ground_size_(ground_size), support_(std::move(support)) {
  if (ground_size < 0 || ground_size > 31) {
    throw std::invalid_argument("measure: ground size out of range");
  }
  double total = 0.0;
  const std::uint32_t universe =
      ground_size == 0 ? 0u : (ground_size == 31 ? 0x7fffffffu
                                                 : ((1u << ground_size) - 1));
  for (const auto& [mask, prob] : support_) {
    if ((mask & ~universe) != 0) {
      throw std::invalid_argument("measure: subset outside ground set");
    }
    if (prob < 0.0) {
      throw std::invalid_argument("measure: negative probability");
    }
    total += prob;
  }
  if (std::abs(total - 1.0) > kProbabilityTol) {
    throw std::invalid_argument("measure: probabilities do not sum to 1");
  }
}

GroupPartition::GroupPartition(std::vector<std::uint32_t> masks)
    : masks_(std::move(masks)) {
  std::uint32_t seen = 0;
  for (std::uint32_t m : masks_) {
    if ((seen & m) != 0) {
      throw std::invalid_argument("groups must be pairwise disjoint");
    }
    seen |= m;
  }
}

double matrix_tree_total(const WeightedGraph& g) {
  const int v = g.vertices;
  if (v <= 1) return 1.0;
  Mat laplacian = Mat::Zero(v, v);
  for (const auto& e : g.edges) {
    laplacian(e.u, e.u) += e.weight;
    laplacian(e.v, e.v) += e.weight;
    laplacian(e.u, e.v) -= e.weight;
    laplacian(e.v, e.u) -= e.weight;
  }
  return laplacian.topLeftCorner(v - 1, v - 1).determinant();
}

DiscreteMeasure spanning_tree_measure(const WeightedGraph& g,
                                      std::size_t max_trees) {
  const int v = g.vertices;
  const int m = static_cast<int>(g.edges.size());
  if (v < 1) throw std::invalid_argument("spanning trees: empty graph");
  if (m > 31) throw std::invalid_argument("spanning trees: too many edges");
  for (const auto& e : g.edges) {
    if (e.u < 0 || e.u >= v || e.v < 0 || e.v >= v || e.u == e.v) {
      throw std::invalid_argument("spanning trees: bad edge");
    }
    if (!(e.weight > 0.0)) {
      throw std::invalid_argument("spanning trees: non-positive weight");
    }
  }

  // Connectivity first, so disconnected inputs fail fast.
  {
    std::vector<int> parent(v);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& e : g.edges) parent[find(e.u)] = find(e.v);
    for (int i = 1; i < v; ++i) {
      if (find(i) != find(0)) {
        throw std::invalid_argument("spanning trees: graph is disconnected");
      }
    }
  }

  std::map<std::uint32_t, double> support;
  double total_weight = 0.0;

  // Enumerate edge subsets of size v-1 in lexicographic order, keeping
  // the acyclic ones.
  std::vector<int> chosen;
  std::vector<int> parent(v);
  std::function<void(int, int)> recurse = [&](int next, int remaining) {
    if (remaining == 0) {
      std::iota(parent.begin(), parent.end(), 0);
      auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
      };
      double weight = 1.0;
      std::uint32_t mask = 0;
      for (int idx : chosen) {
        const auto& e = g.edges[idx];
        const int ru = find(e.u), rv = find(e.v);
        if (ru == rv) return;
        parent[ru] = rv;
        weight *= e.weight;
        mask |= 1u << idx;
      }
      support[mask] = weight;
      total_weight += weight;
      if (support.size() > max_trees) {
        throw std::invalid_argument("spanning trees: more than max_trees");
      }
      return;
    }
    if (m - next < remaining) return;
    for (int i = next; i <= m - remaining; ++i) {
      chosen.push_back(i);
      recurse(i + 1, remaining - 1);
      chosen.pop_back();
    }
  };
  recurse(0, v - 1);

  const double det_total = matrix_tree_total(g);
  if (std::abs(det_total - total_weight) >
      1e-9 * std::max(1.0, std::abs(det_total))) {
    throw std::logic_error(
        "spanning trees: enumeration disagrees with the matrix-tree "
        "determinant");
  }

  for (auto& [mask, w] : support) w /= total_weight;
  return DiscreteMeasure(m, std::move(support));
}

Vec expectations(const DiscreteMeasure& mu, const GroupPartition& groups) {
  Vec e = Vec::Zero(groups.size());
  for (const auto& [mask, prob] : mu.support()) {
    for (int i = 0; i < groups.size(); ++i) {
      e[i] += prob * popcount(mask & groups.mask(i));
    }
  }
  return e;
}

double exact_joint_probability(const DiscreteMeasure& mu,
                               const GroupPartition& groups,
                               const ExponentVec& kappa) {
  if (kappa.size() != groups.size()) {
    throw std::invalid_argument("joint probability: kappa length mismatch");
  }
  double p = 0.0;
  for (const auto& [mask, prob] : mu.support()) {
    bool match = true;
    for (int i = 0; i < groups.size() && match; ++i) {
      match = popcount(mask & groups.mask(i)) == kappa[i];
    }
    if (match) p += prob;
  }
  return p;
}

Polynomial generating_polynomial(const DiscreteMeasure& mu) {
  Polynomial g(mu.ground_size());
  for (const auto& [mask, prob] : mu.support()) {
    if (prob == 0.0) continue;
    ExponentVec e = ExponentVec::Zero(mu.ground_size());
    for (int i = 0; i < mu.ground_size(); ++i) {
      if (mask & (1u << i)) e[i] = 1;
    }
    g.add_term(e, prob);
  }
  return g;
}

Polynomial grouped_generating_polynomial(const DiscreteMeasure& mu,
                                         const GroupPartition& groups) {
  const Polynomial g = generating_polynomial(mu);
  std::map<int, SubstTarget<double>> assignment;
  for (int v = 0; v < mu.ground_size(); ++v) {
    assignment[v] = SubstTarget<double>::to_constant(1.0);
  }
  for (int i = 0; i < groups.size(); ++i) {
    for (int v = 0; v < mu.ground_size(); ++v) {
      if (groups.mask(i) & (1u << v)) {
        assignment[v] = SubstTarget<double>::to_variable(i);
      }
    }
  }
  const Polynomial collapsed = substitute(g, assignment);
  if (collapsed.num_vars() == groups.size()) return collapsed;
  // No group touches the support: pad the variable count back up.
  Polynomial out(groups.size());
  for (const auto& [e, c] : collapsed.terms()) {
    ExponentVec padded = ExponentVec::Zero(groups.size());
    padded.head(e.size()) = e;
    out.add_term(padded, c);
  }
  return out;
}

BoundReport sr_probability_bound(const Vec& expectation,
                                 const ExponentVec& kappa) {
  const int n = static_cast<int>(expectation.size());
  if (kappa.size() != n) {
    throw std::invalid_argument("sr_probability_bound: length mismatch");
  }
  if (n > 20) {
    throw std::invalid_argument(
        "sr_probability_bound: more than 20 groups is unsupported");
  }
  BoundReport report;
  report.exact_kind = "joint-probability";
  report.profile = profile_from(expectation, kappa);
  // two_term_bound raises InvalidProfileError naming the subset size.
  const double two = two_term_bound(report.profile);
  const double one = one_term_bound(expectation, kappa);
  const double pref = gurvits_prefactor(kappa);
  report.two_term = two;
  report.one_term = one;
  report.prefactor = pref;
  report.strong = pref * two;
  report.lite = pref * one;

  double eps_headline = 1.0;
  if (n > 0) {
    eps_headline = std::min(report.profile.eps.minCoeff(),
                            report.profile.delta.minCoeff());
  }
  double headline = std::pow(eps_headline, n);
  for (int i = 0; i < n; ++i) {
    if (kappa[i] > 0) headline /= std::exp(1.0) * std::sqrt(double(kappa[i]));
  }
  report.headline = headline;
  report.baseline_kko = kko_doubly_exp_bound(eps_headline, kappa);

  double l1 = 0.0;
  for (int i = 0; i < n; ++i) l1 += std::abs(expectation[i] - kappa[i]);
  if (l1 < 1.0) {
    report.simple = simple_bound(expectation, kappa);
    report.coeff_bound = coefficient_bound(expectation, kappa);
  }
  return report;
}

Vec rank_distribution(const DiscreteMeasure& mu, std::uint32_t f_mask) {
  const int size = popcount(f_mask);
  Vec dist = Vec::Zero(size + 1);
  for (const auto& [mask, prob] : mu.support()) {
    dist[popcount(mask & f_mask)] += prob;
  }
  return dist;
}

namespace {

double poly_eval(const std::vector<double>& coef, double x) {
  double v = 0.0;
  for (int i = static_cast<int>(coef.size()) - 1; i >= 0; --i) {
    v = v * x + coef[i];
  }
  return v;
}

std::vector<double> poly_derivative(const std::vector<double>& coef) {
  std::vector<double> d;
  for (std::size_t i = 1; i < coef.size(); ++i) {
    d.push_back(coef[i] * static_cast<double>(i));
  }
  return d;
}

double bisect_root(const std::vector<double>& coef, double lo, double hi) {
  double flo = poly_eval(coef, lo);
  const double fhi = poly_eval(coef, hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) return std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = poly_eval(coef, mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> bernoulli_decomposition(const DiscreteMeasure& mu,
                                            std::uint32_t f_mask) {
  const Vec dist = rank_distribution(mu, f_mask);

  // Trim to the actual degree span; z^lo factors are sure successes.
  int lo = 0;
  int hi = static_cast<int>(dist.size()) - 1;
  while (hi > 0 && dist[hi] == 0.0) --hi;
  while (lo < hi && dist[lo] == 0.0) ++lo;
  std::vector<double> params(lo, 1.0);
  const int deg = hi - lo;
  if (deg == 0) return params;

  std::vector<double> coef(deg + 1);
  for (int k = 0; k <= deg; ++k) coef[k] = dist[lo + k];

  // Companion-matrix eigenvalues, then polishing.
  Mat companion = Mat::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -coef[i] / coef[deg];
  const Eigen::EigenSolver<Mat> solver(companion);
  const auto values = solver.eigenvalues();

  std::vector<double> roots;
  for (int i = 0; i < values.size(); ++i) {
    const double scale = 1.0 + std::abs(values[i].real());
    if (std::abs(values[i].imag()) > 1e-8 * scale) {
      std::ostringstream os;
      os << "rank polynomial has a complex root " << values[i].real() << " + "
         << values[i].imag() << "i: input is not strongly Rayleigh";
      throw NotStronglyRayleighError(os.str());
    }
    roots.push_back(std::min(values[i].real(), 0.0));
  }
  std::sort(roots.begin(), roots.end());

  // Cluster nearly equal roots; a cluster of multiplicity k holds a simple
  // root of the (k-1)-th derivative, bisected on a sign change inside a
  // bracket tight enough to exclude every other derivative root.
  std::vector<double> refined;
  std::size_t i = 0;
  while (i < roots.size()) {
    std::size_t j = i + 1;
    while (j < roots.size() &&
           roots[j] - roots[j - 1] < 1e-5 * (1.0 + std::abs(roots[j]))) {
      ++j;
    }
    const std::size_t mult = j - i;
    double center =
        std::accumulate(roots.begin() + i, roots.begin() + j, 0.0) /
        static_cast<double>(mult);
    std::vector<double> target = coef;
    for (std::size_t k = 1; k < mult; ++k) target = poly_derivative(target);
    const double spread = roots[j - 1] - roots[i];
    const double width = 100.0 * spread + 1e-7 * (1.0 + std::abs(center));
    const double polished =
        bisect_root(target, center - width, center + width);
    if (!std::isnan(polished)) center = polished;
    for (std::size_t k = 0; k < mult; ++k) refined.push_back(center);
    i = j;
  }

  for (double rho : refined) {
    params.push_back(1.0 / (1.0 - rho));  // root at rho = -r
  }

  // Round trip: the convolution must reproduce the rank distribution.
  Vec recon = Vec::Zero(dist.size());
  recon[0] = 1.0;
  for (double p : params) {
    for (int k = static_cast<int>(dist.size()) - 1; k >= 0; --k) {
      const double stay = recon[k] * (1.0 - p);
      const double move = k > 0 ? recon[k - 1] * p : 0.0;
      recon[k] = stay + move;
    }
  }
  for (int k = 0; k < dist.size(); ++k) {
    if (std::abs(recon[k] - dist[k]) > 1e-9) {
      std::ostringstream os;
      os << "bernoulli decomposition fails to reproduce the rank "
            "distribution at k="
         << k << " (got " << recon[k] << ", expected " << dist[k]
         << "): input is not strongly Rayleigh";
      throw NotStronglyRayleighError(os.str());
    }
  }
  return params;
}

DiscreteMeasure condition(const DiscreteMeasure& mu, std::uint32_t required,
                          std::uint32_t forbidden) {
  if ((required & forbidden) != 0) {
    throw std::invalid_argument("condition: contradictory event");
  }
  std::map<std::uint32_t, double> kept;
  double total = 0.0;
  for (const auto& [mask, prob] : mu.support()) {
    if ((mask & required) == required && (mask & forbidden) == 0) {
      kept[mask] = prob;
      total += prob;
    }
  }
  if (total <= 0.0) {
    throw std::invalid_argument("condition: event has probability zero");
  }
  for (auto& [mask, prob] : kept) prob /= total;
  return DiscreteMeasure(mu.ground_size(), std::move(kept));
}

StableProbeResult falsify_strongly_rayleigh(const DiscreteMeasure& mu,
                                            int samples, std::uint64_t seed) {
  StableProbeResult result;
  Rng rng(seed);
  const int m = mu.ground_size();
  const std::uint32_t universe =
      m == 0 ? 0u : (m >= 31 ? 0x7fffffffu : ((1u << m) - 1));

  // Upper-half-plane probes of the generating polynomial, normalized by
  // the triangle-inequality upper bound so the ratio is scale free.
  std::vector<std::complex<double>> z(m);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < m; ++i) {
      z[i] = {rng.uniform(-2.0, 2.0), rng.uniform(0.05, 2.0)};
    }
    std::complex<double> value = 0.0;
    double bound = 0.0;
    for (const auto& [mask, prob] : mu.support()) {
      std::complex<double> term = prob;
      double term_bound = prob;
      for (int i = 0; i < m; ++i) {
        if (mask & (1u << i)) {
          term *= z[i];
          term_bound *= std::abs(z[i]);
        }
      }
      value += term;
      bound += term_bound;
    }
    if (bound > 0.0) {
      const double ratio = std::abs(value) / bound;
      result.min_normalized_abs = std::min(result.min_normalized_abs, ratio);
      if (ratio < 1e-9) {
        result.plausible = false;
        result.detail =
            "generating polynomial vanishes at an upper-half-plane probe";
        return result;
      }
    }
  }

  // Rank-sequence spot checks: strongly Rayleigh measures have real-rooted
  // rank polynomials for every index set.
  const int rank_checks = std::min(64, samples);
  for (int s = 0; s < rank_checks; ++s) {
    const std::uint32_t f_mask =
        static_cast<std::uint32_t>(rng.next()) & universe;
    try {
      bernoulli_decomposition(mu, f_mask);
    } catch (const NotStronglyRayleighError& err) {
      result.plausible = false;
      result.detail = err.what();
      return result;
    }
  }
  return result;
}

}  // namespace capbound
