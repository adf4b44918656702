// Batch front end for reproducible verification runs. Every subcommand
// reads JSON inputs, writes one JSON report (stdout or --out), and uses a
// single 64-bit seed for all randomness, so identical inputs and seed give
// byte-identical output.
//
// Exit codes: 0 success; 1 I/O or argument errors; 2 domain refusals
// (invalid deviation profile, infeasible targets, failed productization);
// 3 verification suites with violations.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "capbound/bernoulli.hpp"
#include "capbound/bounds.hpp"
#include "capbound/capacity.hpp"
#include "capbound/json_io.hpp"
#include "capbound/permanent.hpp"
#include "capbound/report.hpp"
#include "capbound/sr.hpp"
#include "capbound/tsp_audit.hpp"
#include "capbound/verify.hpp"

namespace {

using namespace capbound;
using nlohmann::json;

constexpr int kSchemaVersion = 1;

struct Options {
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::string out;
  std::string format = "json";
};

void emit(const Options& opt, const std::string& payload) {
  if (opt.out.empty()) {
    std::cout << payload << "\n";
  } else {
    write_file(opt.out, payload + "\n");
  }
}

ExponentVec parse_kappa(const std::vector<int>& values) {
  ExponentVec kappa(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) throw CLI::ValidationError("kappa entries must be >= 0");
    kappa[i] = values[i];
  }
  return kappa;
}

Vec parse_vec(const std::vector<double>& values) {
  Vec v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = values[i];
  return v;
}

json base_report(const Options& opt, const std::string& command) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["seed"] = opt.seed;
  return j;
}

int run_capacity(const Options& opt, const std::string& poly_path,
                 const std::vector<int>& kappa_list) {
  const Polynomial p = polynomial_from_json(read_file(poly_path));
  const ExponentVec kappa = parse_kappa(kappa_list);
  const CapacityResult result = capacity({p, kappa, opt.tol});

  BoundReport report;
  report.exact = result.value;
  report.exact_kind = "capacity";
  report.status = to_string(result.status);

  int exit_code = 0;
  const double at_one = eval(p, Vec(Vec::Ones(p.num_vars())));
  const Vec alpha = gradient_at_one(p);
  report.profile = profile_from(alpha, kappa);
  if (std::abs(at_one - 1.0) > 1e-9) {
    report.note =
        "polynomial is not normalized (p(1) != 1); bound chain skipped";
  } else if (report.profile.valid) {
    report.two_term = two_term_bound(report.profile);
    report.one_term = one_term_bound(alpha, kappa);
    report.simple = simple_bound(alpha, kappa);
    report.coeff_bound = coefficient_bound(alpha, kappa);
    report.prefactor = gurvits_prefactor(kappa);
    const double eps_min = std::min(report.profile.eps.minCoeff(),
                                    report.profile.delta.minCoeff());
    report.baseline_kko = kko_doubly_exp_bound(eps_min, kappa);
  } else if (result.status != CapacityStatus::zero_outside) {
    report.note = "deviation profile invalid: some |E[A_S] - kappa_S| >= 1";
    exit_code = 2;
  } else {
    report.note = "kappa outside the Newton polytope; bounds vacuous";
  }

  json j = base_report(opt, "capacity");
  j["report"] = json::parse(to_json_string(report));
  emit(opt, j.dump(2));
  return exit_code;
}

int run_bound(const Options& opt, const std::vector<double>& alpha_list,
              const std::vector<int>& kappa_list) {
  const Vec alpha = parse_vec(alpha_list);
  const ExponentVec kappa = parse_kappa(kappa_list);
  if (alpha.size() != kappa.size()) {
    throw CLI::ValidationError("--alpha and --kappa lengths differ");
  }
  const BoundReport report = sr_probability_bound(alpha, kappa);
  json j = base_report(opt, "bound");
  j["report"] = json::parse(to_json_string(report));
  emit(opt, j.dump(2));
  return 0;
}

int run_sr_bound(const Options& opt, const std::string& graph_path,
                 const std::string& measure_path,
                 const std::string& groups_path,
                 const std::vector<int>& kappa_list) {
  if (graph_path.empty() == measure_path.empty()) {
    throw CLI::ValidationError("provide exactly one of --graph or --measure");
  }
  const DiscreteMeasure mu =
      graph_path.empty()
          ? measure_from_json(read_file(measure_path))
          : spanning_tree_measure(graph_from_json(read_file(graph_path)));
  const GroupPartition groups = groups_from_json(read_file(groups_path));
  const ExponentVec kappa = parse_kappa(kappa_list);

  const Vec expectation = expectations(mu, groups);
  BoundReport report = sr_probability_bound(expectation, kappa);
  report.exact = exact_joint_probability(mu, groups, kappa);
  report.exact_kind = "joint-probability";

  json j = base_report(opt, "sr-bound");
  j["expectations"] = std::vector<double>(
      expectation.data(), expectation.data() + expectation.size());
  j["report"] = json::parse(to_json_string(report));
  emit(opt, j.dump(2));
  return 0;
}

int run_productize(const Options& opt, const std::string& poly_path,
                   const std::vector<double>& point, int degree) {
  const Polynomial p = polynomial_from_json(read_file(poly_path));
  const Vec u = parse_vec(point);
  const RowStochasticMatrix m = productize(p, u, degree, opt.tol, opt.seed);
  json j = base_report(opt, "productize");
  j["matrix"] = json::parse(matrix_to_json(m));
  j["value_at_point"] = phi_eval(m, u);
  j["target"] = eval(p, u);
  emit(opt, j.dump(2));
  return 0;
}

int run_permanent(const Options& opt, const std::string& matrix_path,
                  bool rational) {
  const RowStochasticMatrix m = matrix_from_json(read_file(matrix_path));
  const int n = m.rows();
  if (m.num_vars() + 1 != n) {
    throw CLI::ValidationError("permanent needs a square matrix (d == n+1)");
  }
  json j = base_report(opt, "permanent");
  j["n"] = n;
  const Mat square = m.entries();
  j["permanent"] = permanent<double>(square);
  if (rational) {
    if (n > 12) throw CLI::ValidationError("--rational supports n <= 12");
    Matrix<Rational> mq(n, n);
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) mq(r, c) = rational_from(square(r, c));
    }
    const Rational exact = permanent<Rational>(mq);
    j["permanent_exact"] = exact.str();
  }

  // The matrix lives in Mat_n(c) for c = its column sums; compare against
  // the rank-one member, using the one-term capacity bound as L when the
  // deviation profile at kappa = 1 allows it.
  const Vec c = square.colwise().sum().transpose();
  j["column_sums"] = std::vector<double>(c.data(), c.data() + c.size());
  ColumnSumSpec spec{n, c};
  const Mat rank_one = rank_one_candidate(spec);
  j["rank_one_permanent"] = permanent<double>(Mat(rank_one));
  if (n >= 3) {
    try {
      const double L = one_term_bound(c, ExponentVec::Ones(n));
      const UniquenessCheck check = uniqueness_condition(spec, L);
      json u;
      u["holds"] = check.holds;
      u["lhs"] = check.lhs;
      u["rhs"] = check.rhs;
      u["margin"] = check.margin;
      u["capacity_lower_bound"] = L;
      j["uniqueness"] = std::move(u);
    } catch (const InvalidProfileError&) {
      j["uniqueness"] = nullptr;  // no usable capacity bound at this c
    }
  }
  emit(opt, j.dump(2));
  return 0;
}

int run_bernoulli(const Options& opt, const std::string& table_path) {
  const json input = json::parse(read_file(table_path));
  const int n = input.at("n").get<int>();
  const double q = input.at("q").get<double>();
  const auto g = input.at("g").get<std::vector<double>>();
  const std::string dir = input.value("direction", "min");
  const ExtremalDirection direction =
      dir == "max" ? ExtremalDirection::maximize : ExtremalDirection::minimize;
  const ExtremalResult result = extremal_bernoulli(g, n, q, direction);
  json j = base_report(opt, "bernoulli-extremal");
  j["direction"] = dir;
  j["value"] = result.value;
  j["params"] = result.params.params;
  const Vec dist = sum_distribution(result.params);
  j["sum_distribution"] =
      std::vector<double>(dist.data(), dist.data() + dist.size());
  emit(opt, j.dump(2));
  return 0;
}

int run_tsp_audit(const Options& opt, const std::string& eps_half,
                  const std::string& eps_eta) {
  const TSPConstants constants(eps_half, eps_eta, "1e-4");
  const LemmaConstantsTable table = lemma_constants(constants);
  const AuditReport audit = appendix_bound_audit(constants);
  const ApproximationFactor factor =
      approximation_factor(table.min_p, constants);

  json j = base_report(opt, "tsp-audit");
  j["eps_half"] = to_double(constants.eps_half());
  j["eps_11"] = to_double(constants.eps_11());
  j["eps_eta"] = to_double(constants.eps_eta());
  json items = json::array();
  for (const auto& item : table.items) {
    items.push_back(
        {{"name", item.name}, {"value", item.value}, {"external", item.external}});
  }
  j["lemma_constants"] = std::move(items);
  j["p"] = table.min_p;
  j["approximation_factor"] = {
      {"factor", factor.factor},
      {"gap", factor.gap},
      {"gap_via_eps_p", factor.gap_via_eps_p},
      {"relative_agreement", factor.relative_agreement},
      {"eta_branch_ok", factor.eta_branch_ok}};
  json audit_items = json::array();
  for (const auto& item : audit.items) {
    audit_items.push_back({{"name", item.name},
                           {"claimed", item.claimed},
                           {"computed", item.computed},
                           {"pass", item.pass},
                           {"note", item.note}});
  }
  j["audit"] = std::move(audit_items);
  j["external_assumptions"] = audit.external_assumptions;
  j["all_pass"] = audit.all_pass;
  emit(opt, j.dump(2));
  return audit.all_pass ? 0 : 3;
}

int run_verify(const Options& opt, const std::string& suite, int count) {
  const verify::Summary summary = verify::run_suite(suite, opt.seed, count);
  emit(opt, verify::to_json_string(summary));
  return summary.pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capacity and strongly Rayleigh probability bound toolkit"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--seed", opt.seed, "seed for all randomized routines");
  app.add_option("--tol", opt.tol, "relative tolerance");
  app.add_option("--out", opt.out, "write the JSON report to this file");
  app.add_option("--format", opt.format, "output format (json)")
      ->check(CLI::IsMember({"json"}));

  std::string poly_path, graph_path, measure_path, groups_path, matrix_path,
      table_path;
  std::vector<int> kappa_list;
  std::vector<double> alpha_list, point;
  int degree = 0;
  bool rational = false;
  std::string suite = "all";
  int count = 100;
  std::string eps_half = "0.0002", eps_eta = "1e-10";

  auto* cap = app.add_subcommand("capacity", "capacity and its bound chain");
  cap->add_option("--poly", poly_path, "polynomial JSON file")->required();
  cap->add_option("--kappa", kappa_list, "target exponent vector")->required();

  auto* bound = app.add_subcommand("bound", "bound chain from expectations");
  bound->add_option("--alpha", alpha_list, "expectation vector")->required();
  bound->add_option("--kappa", kappa_list, "integer targets")->required();

  auto* sr =
      app.add_subcommand("sr-bound", "joint probability bounds for a measure");
  sr->add_option("--graph", graph_path, "weighted graph JSON (spanning trees)");
  sr->add_option("--measure", measure_path, "explicit measure JSON");
  sr->add_option("--groups", groups_path, "group partition JSON")->required();
  sr->add_option("--kappa", kappa_list, "integer targets")->required();

  auto* prod = app.add_subcommand("productize",
                                  "match a product of affine forms at a point");
  prod->add_option("--poly", poly_path, "polynomial JSON file")->required();
  prod->add_option("--point", point, "positive evaluation point")->required();
  prod->add_option("--degree", degree, "row count of the product")->required();

  auto* per = app.add_subcommand("permanent", "permanent and minimizer checks");
  per->add_option("--matrix", matrix_path, "matrix JSON file")->required();
  per->add_flag("--rational", rational, "also compute the exact permanent");

  auto* bern = app.add_subcommand("bernoulli-extremal",
                                  "extremal Bernoulli families for E[g(S)]");
  bern->add_option("--table", table_path,
                   "JSON with n, q, g (values over 0..n), direction")
      ->required();

  auto* tsp = app.add_subcommand("tsp-audit", "constant-arithmetic audit");
  tsp->add_option("--eps-half", eps_half, "decimal string, at most 0.0002");
  tsp->add_option("--eps-eta", eps_eta, "decimal string, at most eps_half^2");

  auto* ver = app.add_subcommand("verify", "randomized invariant suites");
  ver->add_option("suite", suite, "bounds|forest|sr|permanent|tsp|all");
  ver->add_option("--count", count, "instances per randomized item");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cap->parsed()) return run_capacity(opt, poly_path, kappa_list);
    if (bound->parsed()) return run_bound(opt, alpha_list, kappa_list);
    if (sr->parsed()) {
      return run_sr_bound(opt, graph_path, measure_path, groups_path,
                          kappa_list);
    }
    if (prod->parsed()) return run_productize(opt, poly_path, point, degree);
    if (per->parsed()) return run_permanent(opt, matrix_path, rational);
    if (bern->parsed()) return run_bernoulli(opt, table_path);
    if (tsp->parsed()) return run_tsp_audit(opt, eps_half, eps_eta);
    if (ver->parsed()) return run_verify(opt, suite, count);
  } catch (const InvalidProfileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NotProductizableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
