#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "capbound/affine_products.hpp"
#include "capbound/sr.hpp"
#include "capbound/types.hpp"

namespace capbound::verify {

// Randomized invariant suites. Every work item derives its own generator
// from (base seed, index), so runs are reproducible and items can execute
// in parallel; aggregation is index-ordered regardless of scheduling.

struct Item {
  std::string name;
  int checked = 0;
  int violations = 0;
  std::vector<std::uint64_t> failing_seeds;
  std::string detail;
};

struct Summary {
  std::string suite;
  std::uint64_t seed = 0;
  int count = 0;
  std::vector<Item> items;
  bool pass() const {
    for (const auto& item : items) {
      if (item.violations > 0) return false;
    }
    return true;
  }
};

// suite is one of: bounds, forest, sr, permanent, tsp, all.
Summary run_suite(const std::string& suite, std::uint64_t seed, int count);

std::string to_json_string(const Summary& summary, int indent = 2);

// Shared instance generators (the acceptance suite drives the same ones).

struct ChainInstance {
  RowStochasticMatrix matrix;
  Vec alpha;
  ExponentVec kappa;
};

// Forest-extreme matrix with n <= 5, d <= 8 and |kappa - alpha|_1 < 1;
// alpha lives on a coarse rational grid so exact pivoting stays cheap.
ChainInstance random_chain_instance(std::uint64_t seed);

// Connected graph on 2..max_vertices vertices; unit or random weights.
WeightedGraph random_connected_graph(std::uint64_t seed, int max_vertices,
                                     bool unit_weights);

// Star, vertex-pair and random groupings of the edge set into <= 3 groups.
std::vector<GroupPartition> grouping_family(const WeightedGraph& g,
                                            std::uint64_t seed);

// All integer targets with every subset-sum deviation below 1 in absolute
// value (equivalently: a valid deviation profile).
std::vector<ExponentVec> valid_kappas(const Vec& expectation);

}  // namespace capbound::verify
