#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "capbound/polynomial.hpp"
#include "capbound/report.hpp"
#include "capbound/types.hpp"

namespace capbound {

// Explicit probability measure over subsets of a ground set [m], m <= 31.
// Subsets are bitmasks. Probabilities are non-negative and sum to 1
// within 1e-12 (checked at construction).
class DiscreteMeasure {
 public:
  DiscreteMeasure(int ground_size,
                  std::map<std::uint32_t, double> support);

  int ground_size() const { return ground_size_; }
  const std::map<std::uint32_t, double>& support() const { return support_; }

 private:
  int ground_size_;
  std::map<std::uint32_t, double> support_;
};

// Pairwise-disjoint groups of ground elements; groups need not cover.
class GroupPartition {
 public:
  explicit GroupPartition(std::vector<std::uint32_t> masks);
  int size() const { return static_cast<int>(masks_.size()); }
  std::uint32_t mask(int i) const { return masks_[i]; }
  const std::vector<std::uint32_t>& masks() const { return masks_; }

 private:
  std::vector<std::uint32_t> masks_;
};

struct WeightedEdge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

struct WeightedGraph {
  int vertices = 0;
  std::vector<WeightedEdge> edges;
};

// The measure mu(T) proportional to prod_{e in T} w_e over all spanning
// trees of g, by exhaustive enumeration (at most max_trees of them). The
// total tree weight is cross-checked against the weighted matrix-tree
// determinant.
DiscreteMeasure spanning_tree_measure(const WeightedGraph& g,
                                      std::size_t max_trees = 1000000);

// Number of spanning trees (weight total for weighted graphs) from the
// reduced weighted Laplacian.
double matrix_tree_total(const WeightedGraph& g);

// E[A_i] where A_i = |S ∩ group_i| under mu.
Vec expectations(const DiscreteMeasure& mu, const GroupPartition& groups);

// P[A_i = kappa_i for every i], exactly from the table.
double exact_joint_probability(const DiscreteMeasure& mu,
                               const GroupPartition& groups,
                               const ExponentVec& kappa);

// Generating polynomial g_mu(z) = sum_S mu(S) z^S in ground_size variables.
Polynomial generating_polynomial(const DiscreteMeasure& mu);

// Collapses g_mu onto one variable per group (everything else set to 1).
// Its coefficient at kappa is the joint probability and its gradient at
// one is the expectation vector.
Polynomial grouped_generating_polynomial(const DiscreteMeasure& mu,
                                         const GroupPartition& groups);

// Probability lower bounds from the expectation vector alone. Requires
// every subset-sum deviation |E[A_S] - kappa_S| < 1 (raises
// InvalidProfileError naming the violating subset size otherwise) and
// n <= 20 groups.
BoundReport sr_probability_bound(const Vec& expectation,
                                 const ExponentVec& kappa);

struct NotStronglyRayleighError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The law of |F ∩ T| equals a sum of independent Bernoullis whenever mu is
// strongly Rayleigh; returns their success probabilities (1/(1+r_i) for
// the roots -r_i of the rank polynomial). Raises NotStronglyRayleighError
// if the rank polynomial has a clearly complex root, or if the recovered
// Bernoullis fail to reproduce the rank distribution to 1e-9.
std::vector<double> bernoulli_decomposition(const DiscreteMeasure& mu,
                                            std::uint32_t f_mask);

// Law of |F ∩ T| as a vector over {0..popcount(F)}.
Vec rank_distribution(const DiscreteMeasure& mu, std::uint32_t f_mask);

// Conditions on {S : required ⊆ S, S ∩ forbidden = ∅} and renormalizes.
DiscreteMeasure condition(const DiscreteMeasure& mu, std::uint32_t required,
                          std::uint32_t forbidden);

// Heuristic falsifier: probes g_mu at random upper-half-plane points and
// checks real-rootedness of rank polynomials for random index sets. A
// true strongly Rayleigh measure never trips it; a trip is evidence of a
// non-strongly-Rayleigh table.
struct StableProbeResult {
  bool plausible = true;
  double min_normalized_abs = 1.0;
  std::string detail;
};
StableProbeResult falsify_strongly_rayleigh(const DiscreteMeasure& mu,
                                            int samples = 10000,
                                            std::uint64_t seed = 0);

}  // namespace capbound
