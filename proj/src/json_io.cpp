#include "capbound/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace capbound {

using nlohmann::json;

namespace {

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, true, true);  // allow comments
  return j;
}

}  // namespace

std::string polynomial_to_json(const Polynomial& p, int indent) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) {
    json term;
    term["exp"] = std::vector<int>(e.data(), e.data() + e.size());
    term["coef"] = c;
    terms.push_back(std::move(term));
  }
  json j;
  j["num_vars"] = p.num_vars();
  j["terms"] = std::move(terms);
  return j.dump(indent);
}

Polynomial polynomial_from_json(const std::string& text) {
  const json j = parse(text);
  Polynomial p(j.at("num_vars").get<int>());
  for (const auto& term : j.at("terms")) {
    const auto exps = term.at("exp").get<std::vector<int>>();
    ExponentVec e(exps.size());
    for (std::size_t i = 0; i < exps.size(); ++i) e[i] = exps[i];
    p.add_term(e, term.at("coef").get<double>());
  }
  return p;
}

std::string matrix_to_json(const RowStochasticMatrix& m, int indent) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j <= m.num_vars(); ++j) row.push_back(m.entries()(i, j));
    rows.push_back(std::move(row));
  }
  json j;
  j["d"] = m.rows();
  j["n"] = m.num_vars();
  j["rows"] = std::move(rows);
  return j.dump(indent);
}

RowStochasticMatrix matrix_from_json(const std::string& text) {
  const json j = parse(text);
  const int d = j.at("d").get<int>();
  const int n = j.at("n").get<int>();
  const auto& rows = j.at("rows");
  if (static_cast<int>(rows.size()) != d) {
    throw std::invalid_argument("matrix json: row count mismatch");
  }
  Mat entries(d, n + 1);
  for (int i = 0; i < d; ++i) {
    const auto row = rows[i].get<std::vector<double>>();
    if (static_cast<int>(row.size()) != n + 1) {
      throw std::invalid_argument("matrix json: row length mismatch");
    }
    for (int k = 0; k <= n; ++k) entries(i, k) = row[k];
  }
  return RowStochasticMatrix(std::move(entries));
}

std::string measure_to_json(const DiscreteMeasure& mu, int indent) {
  json support = json::array();
  for (const auto& [mask, prob] : mu.support()) {
    json item;
    std::vector<int> indices;
    for (int i = 0; i < mu.ground_size(); ++i) {
      if (mask & (1u << i)) indices.push_back(i);
    }
    item["set"] = std::move(indices);
    item["prob"] = prob;
    support.push_back(std::move(item));
  }
  json j;
  j["ground_size"] = mu.ground_size();
  j["support"] = std::move(support);
  return j.dump(indent);
}

DiscreteMeasure measure_from_json(const std::string& text) {
  const json j = parse(text);
  const int m = j.at("ground_size").get<int>();
  std::map<std::uint32_t, double> support;
  for (const auto& item : j.at("support")) {
    std::uint32_t mask = 0;
    for (int idx : item.at("set").get<std::vector<int>>()) {
      if (idx < 0 || idx >= m) {
        throw std::invalid_argument("measure json: index outside ground set");
      }
      mask |= 1u << idx;
    }
    support[mask] += item.at("prob").get<double>();
  }
  return DiscreteMeasure(m, std::move(support));
}

WeightedGraph graph_from_json(const std::string& text) {
  const json j = parse(text);
  WeightedGraph g;
  g.vertices = j.at("vertices").get<int>();
  for (const auto& e : j.at("edges")) {
    if (e.size() < 2 || e.size() > 3) {
      throw std::invalid_argument("graph json: edge needs [u, v] or [u, v, w]");
    }
    WeightedEdge edge;
    edge.u = e[0].get<int>();
    edge.v = e[1].get<int>();
    edge.weight = e.size() == 3 ? e[2].get<double>() : 1.0;
    g.edges.push_back(edge);
  }
  return g;
}

std::string graph_to_json(const WeightedGraph& g, int indent) {
  json edges = json::array();
  for (const auto& e : g.edges) {
    edges.push_back(json::array({e.u, e.v, e.weight}));
  }
  json j;
  j["vertices"] = g.vertices;
  j["edges"] = std::move(edges);
  return j.dump(indent);
}

GroupPartition groups_from_json(const std::string& text) {
  const json j = parse(text);
  std::vector<std::uint32_t> masks;
  for (const auto& group : j.at("groups")) {
    std::uint32_t mask = 0;
    for (int idx : group.get<std::vector<int>>()) {
      if (idx < 0 || idx > 30) {
        throw std::invalid_argument("groups json: index out of range");
      }
      mask |= 1u << idx;
    }
    masks.push_back(mask);
  }
  return GroupPartition(std::move(masks));
}

std::string groups_to_json(const GroupPartition& groups, int indent) {
  json list = json::array();
  for (int i = 0; i < groups.size(); ++i) {
    std::vector<int> indices;
    for (int b = 0; b < 31; ++b) {
      if (groups.mask(i) & (1u << b)) indices.push_back(b);
    }
    list.push_back(indices);
  }
  json j;
  j["groups"] = std::move(list);
  return j.dump(indent);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << contents;
}

}  // namespace capbound
