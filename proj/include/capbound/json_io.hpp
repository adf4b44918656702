#pragma once

#include <string>

#include "capbound/affine_products.hpp"
#include "capbound/polynomial.hpp"
#include "capbound/sr.hpp"

namespace capbound {

// File formats. All serializers emit canonical forms: polynomial terms in
// graded-lex order, doubles in shortest round-trip notation, keys sorted
// by the JSON library, so identical values produce identical bytes.
//
//   polynomial: {"num_vars": n, "terms": [{"exp": [...], "coef": c}, ...]}
//   matrix:     {"d": rows, "n": vars, "rows": [[...], ...]}  (n+1 columns)
//   measure:    {"ground_size": m, "support": [{"set": [i...], "prob": p}]}
//   graph:      {"vertices": v, "edges": [[u, w, weight], ...]}
//   groups:     {"groups": [[i...], ...]}

std::string polynomial_to_json(const Polynomial& p, int indent = 2);
Polynomial polynomial_from_json(const std::string& text);

std::string matrix_to_json(const RowStochasticMatrix& m, int indent = 2);
RowStochasticMatrix matrix_from_json(const std::string& text);

std::string measure_to_json(const DiscreteMeasure& mu, int indent = 2);
DiscreteMeasure measure_from_json(const std::string& text);

WeightedGraph graph_from_json(const std::string& text);
std::string graph_to_json(const WeightedGraph& g, int indent = 2);

GroupPartition groups_from_json(const std::string& text);
std::string groups_to_json(const GroupPartition& groups, int indent = 2);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace capbound
