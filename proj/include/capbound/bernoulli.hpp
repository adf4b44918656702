#pragma once

#include <vector>

#include "capbound/types.hpp"

namespace capbound {

// Sums of independent Bernoulli variables and the extremal structure of
// E[g(sum)] over families with a fixed mean total: the optimum is always
// attained with success probabilities in {0, x, 1}.

struct BernoulliFamily {
  std::vector<double> params;  // each in [0, 1]
};

// Exact law of B_1 + ... + B_n over {0..n} by dynamic-programming
// convolution.
Vec sum_distribution(const BernoulliFamily& family);

struct ExtremalResult {
  double value = 0.0;
  BernoulliFamily params;  // a witness attaining the optimum
};

enum class ExtremalDirection { minimize, maximize };

// Optimizes E[g(B_1+...+B_n)] over all independent Bernoulli families with
// sum of parameters q, by exact enumeration of the structured candidates:
// l entries 1 and m-l entries (q-l)/(m-l), for 0 <= l <= floor(q) <= m <= n.
// g is a value table over {0..n}. Ties break toward smaller m, then
// smaller l, so the witness is deterministic.
ExtremalResult extremal_bernoulli(const std::vector<double>& g, int n,
                                  double q, ExtremalDirection direction);

}  // namespace capbound
