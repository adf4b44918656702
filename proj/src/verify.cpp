#include "capbound/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "capbound/bernoulli.hpp"
#include "capbound/bounds.hpp"
#include "capbound/capacity.hpp"
#include "capbound/permanent.hpp"
#include "capbound/rng.hpp"
#include "capbound/tsp_audit.hpp"

namespace capbound::verify {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t item_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix(base ^ splitmix(index + 1));
}

// Runs fn(i) for i in [0, n) across a small thread pool; items are
// independent and pre-seeded, so scheduling cannot change results.
void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers =
      std::max(1, std::min<int>(8, std::thread::hardware_concurrency()));
  if (workers == 1 || n < 4) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct ItemBuilder {
  Item item;
  std::mutex mu;

  explicit ItemBuilder(std::string name) { item.name = std::move(name); }

  void record(std::uint64_t seed, bool ok, const std::string& why = "") {
    std::lock_guard<std::mutex> lock(mu);
    ++item.checked;
    if (!ok) {
      ++item.violations;
      if (item.failing_seeds.size() < 8) item.failing_seeds.push_back(seed);
      if (item.detail.empty()) item.detail = why;
    }
  }

  void note(const std::string& text) {
    std::lock_guard<std::mutex> lock(mu);
    if (item.detail.empty()) item.detail = text;
  }
};

double capacity_value(const Polynomial& p, const ExponentVec& kappa,
                      double tol = 1e-10) {
  return capacity({p, kappa, tol}).value;
}

// DFS-based cycle detection, independent of the union-find route used by
// is_extreme.
bool support_is_forest_dfs(const Mat& entries) {
  const int d = static_cast<int>(entries.rows());
  const int c = static_cast<int>(entries.cols());
  const int total = d + c;
  std::vector<std::vector<int>> adj(total);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < c; ++j) {
      if (entries(i, j) != 0.0) {
        adj[i].push_back(d + j);
        adj[d + j].push_back(i);
      }
    }
  }
  std::vector<bool> visited(total, false);
  // Any edge reaching an already-visited vertex other than the immediate
  // parent closes a cycle (the support graph is simple).
  std::function<bool(int, int)> has_cycle = [&](int v, int parent) {
    visited[v] = true;
    bool parent_edge_used = false;
    for (int w : adj[v]) {
      if (w == parent && !parent_edge_used) {
        parent_edge_used = true;
        continue;
      }
      if (visited[w]) return true;
      if (has_cycle(w, v)) return true;
    }
    return false;
  };
  for (int start = 0; start < total; ++start) {
    if (!visited[start] && has_cycle(start, -1)) return false;
  }
  return true;
}

}  // namespace

ChainInstance random_chain_instance(std::uint64_t seed) {
  Rng rng(seed);
  const int n = 1 + rng.uniform_int(5);
  // Keep |kappa|_1 <= 7 so some d <= 8 fits |alpha|_1.
  ExponentVec kappa(n);
  int kappa_budget = 7;
  for (int i = 0; i < n; ++i) {
    kappa[i] = rng.uniform_int(std::min(3, kappa_budget) + 1);
    kappa_budget -= kappa[i];
  }
  for (int i = n - 1; i > 0; --i) {
    std::swap(kappa[i], kappa[rng.uniform_int(i + 1)]);
  }

  // Deviations on a 1/64 grid with |dev|_1 <= 60/64 (exact in doubles),
  // sign-flipped where alpha would go negative.
  Vec dev = Vec::Zero(n);
  int budget = 1 + rng.uniform_int(60);
  for (int i = 0; i < n; ++i) {
    const int share = i + 1 == n ? budget : rng.uniform_int(budget + 1);
    budget -= share;
    double value = share / 64.0;
    if (rng.uniform() < 0.5) value = -value;
    if (kappa[i] == 0 && value > 0.0) value = -value;  // keep alpha >= 0
    dev[i] = value;
  }
  const Vec alpha = kappa.cast<double>() - dev;

  const double mass = alpha.sum();
  const int d_min = std::max(1, static_cast<int>(std::ceil(mass - 1e-12)));
  const int d = std::min(8, d_min + rng.uniform_int(3));
  return {random_extreme_point(n, d, alpha, rng.next()), alpha, kappa};
}

WeightedGraph random_connected_graph(std::uint64_t seed, int max_vertices,
                                     bool unit_weights) {
  Rng rng(seed);
  WeightedGraph g;
  g.vertices = 2 + rng.uniform_int(std::max(1, max_vertices - 1));
  // Random spanning tree first, then extra edges.
  std::set<std::pair<int, int>> used;
  for (int v = 1; v < g.vertices; ++v) {
    const int u = rng.uniform_int(v);
    used.insert({u, v});
  }
  for (int u = 0; u < g.vertices; ++u) {
    for (int v = u + 1; v < g.vertices; ++v) {
      if (used.count({u, v}) == 0 && rng.uniform() < 0.4) used.insert({u, v});
    }
  }
  for (const auto& [u, v] : used) {
    const double w =
        unit_weights ? 1.0 : 0.25 * (2 + rng.uniform_int(7));  // 0.5..2
    g.edges.push_back({u, v, w});
  }
  return g;
}

std::vector<GroupPartition> grouping_family(const WeightedGraph& g,
                                            std::uint64_t seed) {
  Rng rng(seed);
  const int m = static_cast<int>(g.edges.size());
  std::vector<std::uint32_t> star(g.vertices, 0);
  for (int e = 0; e < m; ++e) {
    star[g.edges[e].u] |= 1u << e;
    star[g.edges[e].v] |= 1u << e;
  }

  std::vector<GroupPartition> out;
  for (int v = 0; v < g.vertices; ++v) {
    out.push_back(GroupPartition({star[v]}));
  }
  // The vertex-pair setup: the joining edge, and both stars without it.
  for (int e = 0; e < m; ++e) {
    const std::uint32_t eb = 1u << e;
    const std::uint32_t a = star[g.edges[e].u] & ~eb;
    const std::uint32_t b = star[g.edges[e].v] & ~eb;
    if (a && b) out.push_back(GroupPartition({eb, a, b}));
  }
  // Disjoint star pairs (non-adjacent vertices).
  for (int u = 0; u < g.vertices; ++u) {
    for (int v = u + 1; v < g.vertices; ++v) {
      if ((star[u] & star[v]) == 0 && star[u] && star[v]) {
        out.push_back(GroupPartition({star[u], star[v]}));
      }
    }
  }
  // A few random disjoint groupings.
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<std::uint32_t> masks(3, 0);
    for (int e = 0; e < m; ++e) {
      const int slot = rng.uniform_int(4);
      if (slot < 3) masks[slot] |= 1u << e;
    }
    std::vector<std::uint32_t> nonempty;
    for (std::uint32_t mk : masks) {
      if (mk) nonempty.push_back(mk);
    }
    if (!nonempty.empty()) out.push_back(GroupPartition(std::move(nonempty)));
  }
  return out;
}

std::vector<ExponentVec> valid_kappas(const Vec& expectation) {
  const int n = static_cast<int>(expectation.size());
  std::vector<int> lo(n), hi(n);
  for (int i = 0; i < n; ++i) {
    lo[i] = std::max(0, static_cast<int>(std::ceil(expectation[i] - 1.0)));
    hi[i] = static_cast<int>(std::floor(expectation[i] + 1.0));
  }
  std::vector<ExponentVec> out;
  ExponentVec kappa(n);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      if (profile_from(expectation, kappa).valid) out.push_back(kappa);
      return;
    }
    for (int v = lo[i]; v <= hi[i]; ++v) {
      kappa[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

namespace {

// ---------------------------------------------------------------- bounds

void check_bound_chain(std::uint64_t seed, int count, std::vector<Item>* out) {
  ItemBuilder chain("bound-chain");
  parallel_for(count, [&](int i) {
    const std::uint64_t s = item_seed(seed, i);
    try {
      const ChainInstance inst = random_chain_instance(s);
      const Polynomial p = associated_polynomial(inst.matrix);
      const double cap = capacity_value(p, inst.kappa);
      const double two = two_term_bound(profile_from(inst.alpha, inst.kappa));
      const double one = one_term_bound(inst.alpha, inst.kappa);
      const double simple = simple_bound(inst.alpha, inst.kappa);
      const bool ok = cap + 1e-7 >= two && two >= one - 1e-12 &&
                      one >= simple - 1e-12 && simple >= 0.0;
      std::ostringstream os;
      os << "cap=" << cap << " two=" << two << " one=" << one
         << " simple=" << simple;
      chain.record(s, ok, os.str());
    } catch (const std::exception& e) {
      chain.record(s, false, e.what());
    }
  });
  out->push_back(chain.item);
}

void check_profile_oracle(std::uint64_t seed, int count,
                          std::vector<Item>* out) {
  ItemBuilder oracle("subset-maxima-vs-enumeration");
  const int trials = std::max(20, count / 5);
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = item_seed(seed ^ 0xabc1, i);
    Rng rng(s);
    const int n = 1 + rng.uniform_int(8);
    ExponentVec kappa(n);
    Vec alpha(n);
    for (int j = 0; j < n; ++j) {
      kappa[j] = rng.uniform_int(4);
      alpha[j] = kappa[j] + rng.uniform(-0.9, 0.9);
      if (alpha[j] < 0.0) alpha[j] = 0.0;
    }
    const DeviationProfile prof = profile_from(alpha, kappa);
    const Vec lite = one_term_eps(alpha, kappa);

    bool ok = true;
    for (int k = 1; k <= n && ok; ++k) {
      double max_exact = -1e18, min_exact = 1e18, max_upto = 0.0;
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        int size = 0;
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
          if (mask & (1u << j)) {
            ++size;
            sum += alpha[j] - kappa[j];
          }
        }
        if (size == k) {
          max_exact = std::max(max_exact, sum);
          min_exact = std::min(min_exact, sum);
        }
        if (size <= k) max_upto = std::max(max_upto, std::abs(sum));
      }
      ok = std::abs(prof.eps[k - 1] - (1.0 - max_exact)) < 1e-12 &&
           std::abs(prof.delta[k - 1] - (1.0 + min_exact)) < 1e-12 &&
           std::abs(lite[k - 1] - (1.0 - max_upto)) < 1e-12;
    }
    oracle.record(s, ok, "profile disagrees with subset enumeration");
  }
  out->push_back(oracle.item);
}

void check_bound_ordering(std::uint64_t seed, int count,
                          std::vector<Item>* out) {
  ItemBuilder mono("lite-profile-monotone");
  ItemBuilder order("one-le-two-le-valid");
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = item_seed(seed ^ 0xabc2, i);
    Rng rng(s);
    const int n = 1 + rng.uniform_int(6);
    ExponentVec kappa(n);
    Vec alpha(n);
    double budget = rng.uniform(0.1, 0.95);
    for (int j = 0; j < n; ++j) {
      kappa[j] = rng.uniform_int(4);
      const double share = j + 1 == n ? budget : rng.uniform(0.0, budget);
      budget -= share;
      double dev = rng.uniform() < 0.5 ? share : -share;
      if (kappa[j] - dev < 0.0) dev = -dev;
      alpha[j] = kappa[j] - dev;
    }
    const Vec lite = one_term_eps(alpha, kappa);
    bool monotone = true;
    for (int k = 1; k < n; ++k) monotone = monotone && lite[k] <= lite[k - 1] + 1e-15;
    mono.record(s, monotone, "one-term eps increased with k");

    try {
      const double two = two_term_bound(profile_from(alpha, kappa));
      const double one = one_term_bound(alpha, kappa);
      const double simple = simple_bound(alpha, kappa);
      order.record(s, two >= one - 1e-12 && one >= simple - 1e-12,
                   "bound chain ordering violated");
    } catch (const std::exception& e) {
      order.record(s, false, e.what());
    }
  }
  out->push_back(mono.item);
  out->push_back(order.item);
}

void check_tightness(std::vector<Item>* out) {
  ItemBuilder tight("tightness-witness-capacity");
  const std::vector<std::vector<int>> kappas = {{1, 1}, {2, 1, 3}, {1, 1, 1, 1}};
  const std::vector<double> epsilons = {0.1, 0.5, 0.9};
  for (const auto& kv : kappas) {
    ExponentVec kappa(kv.size());
    for (std::size_t i = 0; i < kv.size(); ++i) kappa[i] = kv[i];
    for (double eps : epsilons) {
      const Polynomial w = tightness_witness<double>(kappa, eps);
      const double expected = std::pow(eps, static_cast<int>(kv.size()));
      const double cap = capacity_value(w, kappa);
      const double coef = coefficient(w, kappa);
      std::ostringstream os;
      os << "kappa size " << kv.size() << " eps " << eps << ": cap " << cap
         << " coef " << coef << " expected " << expected;
      tight.record(static_cast<std::uint64_t>(eps * 10),
                   std::abs(cap - expected) <= 1e-7 &&
                       std::abs(coef - expected) <= 1e-12,
                   os.str());
    }
  }
  out->push_back(tight.item);
}

// ---------------------------------------------------------------- forest

void check_phi_and_forest(std::uint64_t seed, int count,
                          std::vector<Item>* out) {
  ItemBuilder norm("phi-normalization");
  ItemBuilder forest("extreme-forest-oracle");
  ItemBuilder leaves("left-leaf-count");
  parallel_for(count, [&](int i) {
    const std::uint64_t s = item_seed(seed ^ 0xf0f0, i);
    try {
      Rng rng(s);
      const ChainInstance inst = random_chain_instance(s);
      const RowStochasticMatrix& m = inst.matrix;
      const Polynomial p = associated_polynomial(m);

      const double at_one = eval(p, Vec(Vec::Ones(m.num_vars())));
      const Vec grad = gradient_at_one(p);
      const Vec sums = m.column_sums();
      bool ok = std::abs(at_one - 1.0) <= 1e-10;
      for (int j = 0; j < m.num_vars(); ++j) {
        ok = ok && std::abs(grad[j] - sums[j]) <= 1e-10;
      }
      norm.record(s, ok, "phi(M) not normalized or gradient != column sums");

      // Vertex output must be a forest; a dense perturbation must not be.
      const bool vertex_forest =
          is_extreme(m) && support_is_forest_dfs(m.entries());
      Mat dense = Mat::Zero(2 + rng.uniform_int(4), 3);
      for (int r = 0; r < dense.rows(); ++r) {
        double total = 0.0;
        for (int c = 0; c < dense.cols(); ++c) {
          dense(r, c) = 0.1 + rng.uniform();
          total += dense(r, c);
        }
        dense.row(r) /= total;
      }
      const RowStochasticMatrix dm(std::move(dense));
      const bool dense_agrees =
          is_extreme(dm) == support_is_forest_dfs(dm.entries());
      forest.record(s, vertex_forest && dense_agrees,
                    "union-find and DFS forest tests disagree");

      // Left-leaf lower bound when no right vertex has degree zero.
      const int d = m.rows();
      const int cols = m.num_vars() + 1;
      bool no_empty_column = true;
      for (int j = 0; j < cols; ++j) {
        bool any = false;
        for (int r = 0; r < d; ++r) any = any || m.entries()(r, j) != 0.0;
        no_empty_column = no_empty_column && any;
      }
      if (no_empty_column) {
        int single_rows = 0;
        for (int r = 0; r < d; ++r) {
          int nz = 0;
          for (int j = 0; j < cols; ++j) nz += m.entries()(r, j) != 0.0;
          single_rows += nz == 1;
        }
        leaves.record(s, single_rows >= d - cols + 1,
                      "fewer single-entry rows than d - (n+1) + 1");
      }
    } catch (const std::exception& e) {
      norm.record(s, false, e.what());
    }
  });
  out->push_back(norm.item);
  out->push_back(forest.item);
  out->push_back(leaves.item);
}

void check_log_concavity(std::uint64_t seed, int count,
                         std::vector<Item>* out) {
  ItemBuilder concave("capacity-log-concavity");
  parallel_for(count, [&](int i) {
    const std::uint64_t s = item_seed(seed ^ 0x10c0, i);
    try {
      Rng rng(s);
      const ChainInstance inst = random_chain_instance(s);
      const RowStochasticMatrix a = inst.matrix;
      const RowStochasticMatrix b = random_extreme_point(
          a.num_vars(), a.rows(), inst.alpha, rng.next());
      const RowStochasticMatrix mid(
          Mat(0.5 * (a.entries() + b.entries())));
      const double ca = capacity_value(associated_polynomial(a), inst.kappa);
      const double cb = capacity_value(associated_polynomial(b), inst.kappa);
      const double cm = capacity_value(associated_polynomial(mid), inst.kappa);
      concave.record(s, cm >= std::sqrt(ca * cb) - 1e-8,
                     "midpoint capacity below geometric mean");
    } catch (const std::exception& e) {
      concave.record(s, false, e.what());
    }
  });
  out->push_back(concave.item);
}

void check_column_lemmas(std::uint64_t seed, int count,
                         std::vector<Item>* out) {
  ItemBuilder restrict_item("restrict-zero-column");
  ItemBuilder peel_item("peel-leaf-column");
  parallel_for(count, [&](int i) {
    const std::uint64_t s = item_seed(seed ^ 0x3333, i);
    try {
      Rng rng(s);
      // restrict: find an instance whose kappa has a zero at a column with
      // alpha_j < 1.
      for (int attempt = 0; attempt < 12; ++attempt) {
        const ChainInstance inst = random_chain_instance(rng.next());
        int col = -1;
        for (int j = 0; j < inst.kappa.size(); ++j) {
          if (inst.kappa[j] == 0 && inst.alpha[j] < 1.0 &&
              inst.alpha[j] > 0.0) {
            col = j;
            break;
          }
        }
        if (col < 0) continue;
        const auto [reduced, factor] =
            restrict_zero_column(inst.matrix, col, inst.kappa);
        ExponentVec gamma(inst.kappa.size() - 1);
        for (int j = 0, k = 0; j < inst.kappa.size(); ++j) {
          if (j != col) gamma[k++] = inst.kappa[j];
        }
        const double lhs =
            capacity_value(associated_polynomial(inst.matrix), inst.kappa);
        const double rhs =
            factor * capacity_value(associated_polynomial(reduced), gamma);
        const bool ok = lhs - rhs >= -1e-8 &&
                        factor >= 1.0 - inst.alpha[col] - 1e-12;
        restrict_item.record(s, ok, "zero-column reduction inequality failed");
        break;
      }

      // peel: find a vertex with a single-entry variable column.
      for (int attempt = 0; attempt < 12; ++attempt) {
        const ChainInstance inst = random_chain_instance(rng.next());
        const Mat& e = inst.matrix.entries();
        int col = -1;
        for (int j = 0; j < inst.matrix.num_vars(); ++j) {
          int nz = 0;
          for (int r = 0; r < inst.matrix.rows(); ++r) nz += e(r, j) != 0.0;
          if (nz == 1 && inst.alpha[j] > 0.0) {
            col = j;
            break;
          }
        }
        if (col < 0) continue;
        ExponentVec kappa = inst.kappa;
        kappa[col] = 1;
        const auto [reduced, factor] =
            peel_leaf_column(inst.matrix, col, kappa);
        ExponentVec gamma(kappa.size() - 1);
        for (int j = 0, k = 0; j < kappa.size(); ++j) {
          if (j != col) gamma[k++] = kappa[j];
        }
        const double lhs =
            capacity_value(associated_polynomial(inst.matrix), kappa);
        const double rhs =
            factor * capacity_value(associated_polynomial(reduced), gamma);
        peel_item.record(s, lhs - rhs >= -1e-8,
                         "leaf-column peel inequality failed");
        break;
      }
    } catch (const std::exception& e) {
      restrict_item.record(s, false, e.what());
    }
  });
  out->push_back(restrict_item.item);
  out->push_back(peel_item.item);
}

void check_delta_tight(std::uint64_t seed, int count, std::vector<Item>* out) {
  ItemBuilder tight("delta-tight-equality");
  parallel_for(count, [&](int i) {
    const std::uint64_t s = item_seed(seed ^ 0xd1d1, i);
    try {
      Rng rng(s);
      const int n = 1 + rng.uniform_int(4);
      ExponentVec kappa(n);
      for (int j = 0; j < n; ++j) kappa[j] = 1 + rng.uniform_int(3);
      // Non-increasing deviations so prefix sums equal top-k sums.
      std::vector<double> dev(n);
      double budget = rng.uniform(0.05, 0.95);
      for (int j = 0; j < n; ++j) {
        dev[j] = rng.uniform(0.0, budget / n);
      }
      std::sort(dev.begin(), dev.end(), std::greater<double>());
      Vec alpha(n);
      for (int j = 0; j < n; ++j) alpha[j] = kappa[j] - dev[j];

      const RowStochasticMatrix m = delta_tight_matrix(kappa, alpha);
      const bool valid = validate(m, alpha, 1e-10).ok;
      const bool extreme = is_extreme(m);
      const double cap =
          capacity_value(associated_polynomial(m), kappa);
      const double bound = two_term_bound(profile_from(alpha, kappa));
      double prefix_product = 1.0, prefix = 0.0;
      for (int j = 0; j < n; ++j) {
        prefix += dev[j];
        prefix_product *= 1.0 - prefix;
      }
      const bool ok = valid && extreme && std::abs(cap - bound) <= 1e-8 &&
                      std::abs(cap - prefix_product) <= 1e-8;
      std::ostringstream os;
      os << "cap=" << cap << " two_term=" << bound
         << " prefix=" << prefix_product << " valid=" << valid
         << " extreme=" << extreme;
      tight.record(s, ok, os.str());
    } catch (const std::exception& e) {
      tight.record(s, false, e.what());
    }
  });
  out->push_back(tight.item);
}

void check_productize(std::uint64_t seed, int count, std::vector<Item>* out) {
  ItemBuilder hidden("productize-hidden-matrix");
  const int trials = std::max(10, count / 5);
  parallel_for(trials, [&](int i) {
    const std::uint64_t s = item_seed(seed ^ 0x9d9d, i);
    try {
      Rng rng(s);
      const int n = 1 + rng.uniform_int(3);
      const int d = 2 + rng.uniform_int(3);
      Vec alpha(n);
      for (int j = 0; j < n; ++j) alpha[j] = rng.uniform(0.2, 1.4);
      if (alpha.sum() > d - 0.2) alpha *= (d - 0.2) / alpha.sum();

      // Hidden interior matrix: centroid plus feasible 4-cycle moves.
      Mat hidden_m(d, n + 1);
      Vec sums(n + 1);
      sums.head(n) = alpha;
      sums[n] = d - alpha.sum();
      for (int r = 0; r < d; ++r) hidden_m.row(r) = sums.transpose() / d;
      for (int move = 0; move < 4 * d; ++move) {
        const int r1 = rng.uniform_int(d), r2 = rng.uniform_int(d);
        const int c1 = rng.uniform_int(n + 1), c2 = rng.uniform_int(n + 1);
        if (r1 == r2 || c1 == c2) continue;
        const double room = std::min(hidden_m(r1, c2), hidden_m(r2, c1));
        const double delta = rng.uniform(0.0, 0.9 * room);
        hidden_m(r1, c1) += delta;
        hidden_m(r2, c2) += delta;
        hidden_m(r1, c2) -= delta;
        hidden_m(r2, c1) -= delta;
      }
      const RowStochasticMatrix m0{Mat(hidden_m)};
      const Polynomial p = associated_polynomial(m0);
      Vec u(n);
      for (int j = 0; j < n; ++j) u[j] = rng.uniform(0.5, 2.0);

      const RowStochasticMatrix found = productize(p, u, d, 1e-8, rng.next());
      const double target = eval(p, u);
      const double got = phi_eval(found, u);
      hidden.record(s, std::abs(got - target) <= 1e-8 * target,
                    "recovered product misses the target value");
    } catch (const std::exception& e) {
      hidden.record(s, false, e.what());
    }
  });
  out->push_back(hidden.item);

  ItemBuilder rejects("productize-rejects-unstable");
  try {
    // (x1^2 + x2^2)/2 is not real stable and exceeds the class maximum
    // at (2, 1); the search must refuse it.
    Polynomial ns(2);
    ExponentVec e(2);
    e << 2, 0;
    ns.add_term(e, 0.5);
    e << 0, 2;
    ns.add_term(e, 0.5);
    Vec u(2);
    u << 2.0, 1.0;
    bool threw = false;
    try {
      productize(ns, u, 2, 1e-8, 5);
    } catch (const NotProductizableError&) {
      threw = true;
    }
    rejects.record(0, threw, "unstable witness was productized");
  } catch (const std::exception& e) {
    rejects.record(0, false, e.what());
  }
  out->push_back(rejects.item);
}

// -------------------------------------------------------------------- sr

void check_sr_corpus(std::uint64_t seed, int count, std::vector<Item>* out) {
  ItemBuilder validity("sr-bound-validity");
  ItemBuilder bridge("sr-generating-bridge");
  ItemBuilder roundtrip("sr-decomposition-roundtrip");
  std::atomic<int> baseline_total{0}, baseline_wins{0};

  const int graphs = std::max(10, count / 4);
  parallel_for(graphs, [&](int gi) {
    const std::uint64_t s = item_seed(seed ^ 0x5151, gi);
    try {
      Rng rng(s);
      const WeightedGraph g =
          random_connected_graph(rng.next(), 6, gi % 2 == 0);
      const DiscreteMeasure mu = spanning_tree_measure(g);
      const auto groupings = grouping_family(g, rng.next());

      std::set<std::uint32_t> f_masks;
      for (const auto& groups : groupings) {
        const Vec expectation = expectations(mu, groups);
        const Polynomial collapsed =
            grouped_generating_polynomial(mu, groups);
        const Vec poly_grad = gradient_at_one(collapsed);
        bool grad_ok = true;
        for (int i = 0; i < groups.size(); ++i) {
          grad_ok = grad_ok &&
                    std::abs(poly_grad[i] - expectation[i]) <= 1e-12;
          f_masks.insert(groups.mask(i));
        }

        for (const ExponentVec& kappa : valid_kappas(expectation)) {
          const BoundReport report = sr_probability_bound(expectation, kappa);
          const double exact = exact_joint_probability(mu, groups, kappa);
          const bool valid_ok = exact + 1e-12 >= *report.strong &&
                                *report.strong >= *report.lite - 1e-15 &&
                                *report.lite >= 0.0;
          std::ostringstream os;
          os << "exact=" << exact << " strong=" << *report.strong
             << " lite=" << *report.lite;
          validity.record(s, valid_ok, os.str());
          if (groups.size() >= 2) {
            baseline_total.fetch_add(1);
            if (*report.strong > *report.baseline_kko) {
              baseline_wins.fetch_add(1);
            }
          }

          const double coef = coefficient(collapsed, kappa);
          bridge.record(s, grad_ok && std::abs(coef - exact) <= 1e-12,
                        "collapsed coefficient or gradient mismatch");
        }
      }

      // Rank decompositions across the grouping masks plus extras.
      const std::uint32_t full =
          g.edges.size() >= 31 ? 0x7fffffffu
                               : ((1u << g.edges.size()) - 1);
      f_masks.insert(full);
      for (int extra = 0; extra < 3; ++extra) {
        f_masks.insert(static_cast<std::uint32_t>(rng.next()) & full);
      }
      for (std::uint32_t f : f_masks) {
        const std::vector<double> params = bernoulli_decomposition(mu, f);
        // The decomposition already validates the convolution to 1e-9;
        // reaching here without NotStronglyRayleighError is the pass.
        roundtrip.record(s, true, "");
        (void)params;
      }
    } catch (const std::exception& e) {
      validity.record(s, false, e.what());
      roundtrip.record(s, false, e.what());
    }
  });

  std::ostringstream stats;
  const int total = baseline_total.load();
  const int wins = baseline_wins.load();
  stats << "strong beats doubly-exponential baseline in " << wins << "/"
        << total << " instances with n >= 2";
  validity.note(stats.str());
  out->push_back(validity.item);
  out->push_back(bridge.item);
  out->push_back(roundtrip.item);
}

void check_sr_fixed(std::vector<Item>* out) {
  ItemBuilder trees("spanning-tree-measures");
  try {
    WeightedGraph triangle{3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}};
    const DiscreteMeasure tm = spanning_tree_measure(triangle);
    bool ok = tm.support().size() == 3;
    for (const auto& [mask, prob] : tm.support()) {
      ok = ok && std::abs(prob - 1.0 / 3.0) <= 1e-12;
    }
    trees.record(1, ok, "uniform triangle trees wrong");

    WeightedGraph k4{4, {}};
    for (int u = 0; u < 4; ++u) {
      for (int v = u + 1; v < 4; ++v) k4.edges.push_back({u, v, 1.0});
    }
    trees.record(2, spanning_tree_measure(k4).support().size() == 16,
                 "K4 should have 16 spanning trees");

    WeightedGraph wtriangle{3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 2.0}}};
    const DiscreteMeasure wm = spanning_tree_measure(wtriangle);
    // Tree weights are products over tree edges: 1, 2, 2 -> probabilities
    // (1/5, 2/5, 2/5); the matrix-tree determinant pins the total at 5.
    std::vector<double> probs;
    for (const auto& [mask, prob] : wm.support()) probs.push_back(prob);
    std::sort(probs.begin(), probs.end());
    trees.record(3,
                 probs.size() == 3 && std::abs(probs[0] - 0.2) <= 1e-12 &&
                     std::abs(probs[1] - 0.4) <= 1e-12 &&
                     std::abs(probs[2] - 0.4) <= 1e-12,
                 "weighted triangle probabilities wrong");
  } catch (const std::exception& e) {
    trees.record(0, false, e.what());
  }
  out->push_back(trees.item);

  ItemBuilder falsifier("falsifier-flags-non-sr");
  try {
    // Uniform matching on two elements: positively correlated, not
    // strongly Rayleigh; its rank polynomial over both elements is
    // (1 + z^2)/2 with complex roots.
    DiscreteMeasure matching(2, {{0u, 0.5}, {3u, 0.5}});
    const StableProbeResult probe = falsify_strongly_rayleigh(matching, 2000, 11);
    falsifier.record(0, !probe.plausible,
                     "non-strongly-Rayleigh table not flagged");

    WeightedGraph triangle{3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}}};
    const StableProbeResult genuine =
        falsify_strongly_rayleigh(spanning_tree_measure(triangle), 2000, 12);
    falsifier.record(1, genuine.plausible, "tree measure wrongly flagged");
  } catch (const std::exception& e) {
    falsifier.record(0, false, e.what());
  }
  out->push_back(falsifier.item);

  ItemBuilder na("negative-association-conditioning");
  try {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const WeightedGraph g = random_connected_graph(rng.next(), 6, false);
      const DiscreteMeasure mu = spanning_tree_measure(g);
      const int m = static_cast<int>(g.edges.size());
      const std::uint32_t full = (1u << m) - 1;
      const std::uint32_t a_mask = static_cast<std::uint32_t>(rng.next()) & full;
      const std::uint32_t b_mask =
          static_cast<std::uint32_t>(rng.next()) & full & ~a_mask;
      if (!a_mask || !b_mask) continue;
      const GroupPartition ga({a_mask});
      double x_a = 0.0, x_b = 0.0;
      {
        const GroupPartition gab({a_mask, b_mask});
        const Vec exp_ab = expectations(mu, gab);
        x_a = exp_ab[0];
        x_b = exp_ab[1];
      }
      try {
        const DiscreteMeasure cond = condition(mu, 0, b_mask);
        const double lhs = expectations(cond, ga)[0];
        na.record(trial, lhs <= x_a + x_b + 1e-12,
                  "E[A | B = 0] exceeded x(A) + x(B)");
      } catch (const std::invalid_argument&) {
        // B_T = 0 can be impossible (B covers a cut); skip those.
      }
      // Conditioning on a single edge being present.
      const int e = rng.uniform_int(m);
      if ((a_mask & (1u << e)) == 0) {
        const DiscreteMeasure cond = condition(mu, 1u << e, 0);
        const GroupPartition ge({1u << e});
        const double x_e = expectations(mu, ge)[0];
        const double lhs = expectations(cond, ga)[0];
        na.record(trial + 100,
                  lhs <= x_a + 1e-12 && lhs >= x_a - x_e - 1e-12,
                  "E[A | e in T] outside [x(A) - x_e, x(A)]");
      }
    }
  } catch (const std::exception& e) {
    na.record(0, false, e.what());
  }
  out->push_back(na.item);

  ItemBuilder polar("tightness-measure-joint-probability");
  try {
    ExponentVec kappa(3);
    kappa << 2, 1, 3;
    const double eps = 0.3;
    const Polynomial w = tightness_witness<double>(kappa, eps);
    const Polarization<double> pol = polarize(w);
    // The polarization is multiaffine with p(1) = 1: a measure over the
    // block ground set whose block counts reproduce the witness.
    std::map<std::uint32_t, double> support;
    for (const auto& [e, c] : pol.poly.terms()) {
      std::uint32_t mask = 0;
      for (int i = 0; i < e.size(); ++i) {
        if (e[i] == 1) mask |= 1u << i;
      }
      support[mask] += c;
    }
    const DiscreteMeasure mu(pol.poly.num_vars(), std::move(support));
    std::vector<std::uint32_t> blocks;
    for (const auto& [first, last] : pol.blocks) {
      std::uint32_t mask = 0;
      for (int v = first; v < last; ++v) mask |= 1u << v;
      blocks.push_back(mask);
    }
    const GroupPartition groups(std::move(blocks));
    const double joint = exact_joint_probability(mu, groups, kappa);
    polar.record(0, std::abs(joint - std::pow(eps, 3)) <= 1e-12,
                 "polarized witness joint probability is not eps^n");
    const Vec expectation = expectations(mu, groups);
    const BoundReport report = sr_probability_bound(expectation, kappa);
    polar.record(1, joint + 1e-12 >= *report.strong,
                 "strong bound exceeds the tight joint probability");
  } catch (const std::exception& e) {
    polar.record(0, false, e.what());
  }
  out->push_back(polar.item);
}

// --------------------------------------------------------------- permanent

void check_permanent(std::uint64_t seed, int count, std::vector<Item>* out) {
  ItemBuilder multilinear("permanent-row-multilinearity");
  ItemBuilder gbound("permanent-gurvits-specialization");
  parallel_for(count, [&](int i) {
    const std::uint64_t s = item_seed(seed ^ 0x9e99, i);
    try {
      Rng rng(s);
      const int n = 2 + rng.uniform_int(5);
      Mat m(n, n);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) m(r, c) = rng.uniform();
      }
      const int row = rng.uniform_int(n);
      Vec u(n), v(n);
      for (int c = 0; c < n; ++c) {
        u[c] = rng.uniform();
        v[c] = rng.uniform();
      }
      const double t = rng.uniform();
      Mat mu_row = m, mv_row = m, mixed = m;
      mu_row.row(row) = u.transpose();
      mv_row.row(row) = v.transpose();
      mixed.row(row) = (t * u + (1.0 - t) * v).transpose();
      const double lhs = permanent<double>(mixed);
      const double rhs = t * permanent<double>(mu_row) +
                         (1.0 - t) * permanent<double>(mv_row);
      multilinear.record(s, std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)),
                         "permanent is not affine in a row");

      // Row-stochastic matrix: per(M) >= prefactor(1) * capacity at ones.
      Mat rs(n, n);
      for (int r = 0; r < n; ++r) {
        double total = 0.0;
        for (int c = 0; c < n; ++c) {
          rs(r, c) = 0.05 + rng.uniform();
          total += rs(r, c);
        }
        rs.row(r) /= total;
      }
      Mat with_constant(n, n + 1);
      with_constant.leftCols(n) = rs;
      with_constant.col(n).setZero();
      const Polynomial p =
          associated_polynomial(RowStochasticMatrix(std::move(with_constant)));
      const ExponentVec ones = ExponentVec::Ones(n);
      const double cap = capacity_value(p, ones);
      const double per = permanent<double>(rs);
      gbound.record(s, per >= gurvits_prefactor(ones) * cap - 1e-10,
                    "permanent below the capacity lower bound");
    } catch (const std::exception& e) {
      multilinear.record(s, false, e.what());
    }
  });
  out->push_back(multilinear.item);
  out->push_back(gbound.item);

  ItemBuilder ryser("ryser-vs-naive-rational");
  const int trials = std::max(5, count / 10);
  for (int i = 0; i < trials; ++i) {
    const std::uint64_t s = item_seed(seed ^ 0x4e4e, i);
    Rng rng(s);
    const int n = 2 + rng.uniform_int(5);
    Matrix<Rational> m(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        m(r, c) = Rational(rng.uniform_int(17), 1 + rng.uniform_int(7));
      }
    }
    // Naive permanent by recursive expansion along the first row.
    std::function<Rational(const Matrix<Rational>&)> naive =
        [&](const Matrix<Rational>& a) -> Rational {
      const int k = static_cast<int>(a.rows());
      if (k == 0) return Rational(1);
      Rational total(0);
      for (int c = 0; c < k; ++c) {
        if (a(0, c) == 0) continue;
        Matrix<Rational> minor(k - 1, k - 1);
        for (int r = 1; r < k; ++r) {
          for (int cc = 0, out_c = 0; cc < k; ++cc) {
            if (cc == c) continue;
            minor(r - 1, out_c++) = a(r, cc);
          }
        }
        total += a(0, c) * naive(minor);
      }
      return total;
    };
    ryser.record(s, permanent<Rational>(m) == naive(m),
                 "Ryser disagrees with naive expansion");
  }
  out->push_back(ryser.item);

  ItemBuilder scan("sparse-minimizer-scan");
  try {
    int threshold = -1;
    for (int n = 3; n <= 60; ++n) {
      const MinPerCounterexample ce = min_per_counterexample(n, 1.0);
      if (ce.per_sparse < ce.per_rank_one && ce.c_deviation < 2.0) {
        threshold = n;
        break;
      }
    }
    std::ostringstream os;
    os << "first n with sparse < rank-one at t=1: " << threshold;
    scan.record(0, threshold >= 3, os.str());
    scan.note(os.str());
  } catch (const std::exception& e) {
    scan.record(0, false, e.what());
  }
  out->push_back(scan.item);

  ItemBuilder unique("uniqueness-regime-local-search");
  try {
    ColumnSumSpec spec{3, Vec::Ones(3)};
    const UniquenessCheck check = uniqueness_condition(spec, 1.0);
    unique.record(0, check.holds && std::abs(check.margin - 0.125) <= 1e-12,
                  "doubly stochastic n=3 uniqueness margin wrong");
    const MinimizeResult found = minimize_permanent(spec, 21, 200, 3);
    const Mat target = rank_one_candidate(spec);
    unique.record(1, (found.matrix - target).cwiseAbs().maxCoeff() <= 1e-6,
                  "search missed the rank-one minimizer");
  } catch (const std::exception& e) {
    unique.record(0, false, e.what());
  }
  out->push_back(unique.item);
}

// -------------------------------------------------------------------- tsp

void check_tsp(std::vector<Item>* out) {
  ItemBuilder constants("lemma-constants-defaults");
  try {
    const TSPConstants c = TSPConstants::defaults();
    const LemmaConstantsTable table = lemma_constants(c);
    const std::vector<double> expected = {1.5e-9, 1.56e-9, 1.52e-9,
                                          1.992e-9, 1.94e-9};
    bool ok = table.items.size() == 6;
    for (int i = 0; i < 5 && ok; ++i) {
      ok = table.items[i].value == expected[i];
    }
    ok = ok && table.min_p == 1.5e-9 && table.items[5].external;
    constants.record(0, ok, "default lemma constants differ");
  } catch (const std::exception& e) {
    constants.record(0, false, e.what());
  }
  out->push_back(constants.item);

  ItemBuilder factor("approximation-factor");
  try {
    const TSPConstants c = TSPConstants::defaults();
    const ApproximationFactor f = approximation_factor(1.5e-9, c);
    factor.record(0, f.gap >= 2.17e-34 && f.gap <= 2.19e-34 && f.eta_branch_ok,
                  "gap at p = 1.5e-9 outside [2.17e-34, 2.19e-34]");
    const ApproximationFactor zero = approximation_factor(0.0, c);
    factor.record(1, zero.factor == 1.5, "p = 0 must give exactly 3/2");
    const ApproximationFactor edge = approximation_factor(1e-4, c);
    factor.record(2, std::abs(edge.gap - 9.7e-25) <= 1e-36,
                  "gap at the precondition boundary wrong");
    bool threw = false;
    try {
      approximation_factor(2e-4, c);
    } catch (const std::invalid_argument&) {
      threw = true;
    }
    factor.record(3, threw, "p above threshold accepted");
  } catch (const std::exception& e) {
    factor.record(0, false, e.what());
  }
  out->push_back(factor.item);

  ItemBuilder pair("vertex-pair-closed-forms");
  try {
    bool ok = true;
    for (int i = 0; i <= 500 && ok; ++i) {
      const double x = 0.5 + 0.001 * i;
      const VertexPairBound b = vertex_pair_bound(x, VertexPairCase::above_half);
      ok = std::abs(b.strong - b.closed_form) <= 1e-15;
    }
    for (int i = 0; i <= 500 && ok; ++i) {
      const double x = 0.001 * i;
      const VertexPairBound b = vertex_pair_bound(x, VertexPairCase::below_half);
      ok = std::abs(b.strong - b.closed_form) <= 1e-15;
    }
    pair.record(0, ok, "strong bound differs from the closed form");
  } catch (const std::exception& e) {
    pair.record(0, false, e.what());
  }
  out->push_back(pair.item);

  ItemBuilder audit("appendix-constant-audit");
  try {
    const AuditReport report = appendix_bound_audit(TSPConstants::defaults());
    for (std::size_t i = 0; i < report.items.size(); ++i) {
      audit.record(i, report.items[i].pass,
                   report.items[i].name + " below its claimed constant");
    }
  } catch (const std::exception& e) {
    audit.record(0, false, e.what());
  }
  out->push_back(audit.item);

  ItemBuilder headline("headline-prefactor-comparison");
  try {
    bool ok = true;
    for (int k = 1; k <= 50; ++k) {
      ExponentVec kappa(1);
      kappa << k;
      const double pref = gurvits_prefactor(kappa);
      ok = ok && pref >= 1.0 / (std::exp(1.0) * std::sqrt(double(k))) - 1e-15;
    }
    headline.record(0, ok, "kappa^kappa e^-kappa / kappa! < 1/(e sqrt(kappa))");
  } catch (const std::exception& e) {
    headline.record(0, false, e.what());
  }
  out->push_back(headline.item);
}

}  // namespace

Summary run_suite(const std::string& suite, std::uint64_t seed, int count) {
  Summary summary;
  summary.suite = suite;
  summary.seed = seed;
  summary.count = count;
  auto& items = summary.items;

  const bool all = suite == "all";
  if (suite == "bounds" || all) {
    check_bound_chain(seed, count, &items);
    check_profile_oracle(seed, count, &items);
    check_bound_ordering(seed, count, &items);
    check_tightness(&items);
  }
  if (suite == "forest" || all) {
    check_phi_and_forest(seed, count, &items);
    check_log_concavity(seed, std::max(20, count / 2), &items);
    check_column_lemmas(seed, std::max(20, count / 2), &items);
    check_delta_tight(seed, std::max(20, count / 2), &items);
    check_productize(seed, count, &items);
  }
  if (suite == "sr" || all) {
    check_sr_corpus(seed, count, &items);
    check_sr_fixed(&items);
  }
  if (suite == "permanent" || all) {
    check_permanent(seed, count, &items);
  }
  if (suite == "tsp" || all) {
    check_tsp(&items);
  }
  if (items.empty()) {
    throw std::invalid_argument(
        "unknown suite (use bounds|forest|sr|permanent|tsp|all)");
  }
  return summary;
}

std::string to_json_string(const Summary& summary, int indent) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["suite"] = summary.suite;
  j["seed"] = summary.seed;
  j["count"] = summary.count;
  j["pass"] = summary.pass();
  nlohmann::json items = nlohmann::json::array();
  for (const auto& item : summary.items) {
    nlohmann::json ji;
    ji["name"] = item.name;
    ji["checked"] = item.checked;
    ji["violations"] = item.violations;
    ji["failing_seeds"] = item.failing_seeds;
    if (!item.detail.empty()) ji["detail"] = item.detail;
    items.push_back(std::move(ji));
  }
  j["items"] = std::move(items);
  return j.dump(indent);
}

}  // namespace capbound::verify
