#pragma once

#include <string>
#include <vector>

#include "capbound/bounds.hpp"
#include "capbound/types.hpp"

namespace capbound {

// Constant-arithmetic audit of the max-entropy TSP analysis: the
// vertex-pair probability bounds, the six per-lemma constants feeding the
// event-probability floor p, and the final approximation factor. All
// named constants are kept as exact decimal strings and evaluated in
// rational arithmetic, so audited equalities are bit-for-bit rather than
// accumulated-float approximations.

class TSPConstants {
 public:
  // eps_11 is derived as eps_half / 12; eps_eta must be <= eps_half^2.
  TSPConstants(const std::string& eps_half, const std::string& eps_eta,
               const std::string& p_threshold);
  static TSPConstants defaults();  // 0.0002, 1e-10, 1e-4

  const Rational& eps_half() const { return eps_half_; }
  const Rational& eps_11() const { return eps_11_; }
  const Rational& eps_eta() const { return eps_eta_; }
  const Rational& p_threshold() const { return p_threshold_; }

 private:
  Rational eps_half_, eps_11_, eps_eta_, p_threshold_;
};

struct VertexPairBound {
  double strong = 0.0;       // prefactor times the two-term product minimum
  double closed_form = 0.0;  // e^-3 x^2(2x-1)  or  4 e^-4 (1-x)^2(1-2x)
  DeviationProfile profile;
};

enum class VertexPairCase { above_half, below_half };

// Simultaneous even-degree bound for a vertex pair joined by an edge of
// marginal x_e, via the counting variables (1[e in T], deg(u)-1[e],
// deg(v)-1[e]) with targets (1,1,1) above half and (0,2,2) below.
VertexPairBound vertex_pair_bound(double x_e, VertexPairCase which);

struct LemmaConstant {
  std::string name;
  double value = 0.0;
  bool external = false;  // recorded from the source analysis, not derived
};

struct LemmaConstantsTable {
  std::vector<LemmaConstant> items;  // six entries
  double min_p = 0.0;
};

LemmaConstantsTable lemma_constants(const TSPConstants& c);

struct ApproximationFactor {
  double factor = 0.0;         // 3/2 - gap
  double gap = 0.0;            // 9.7e-17 p^2
  double gap_via_eps_p = 0.0;  // (1.56e-6 p)^2 / 25000
  double relative_agreement = 0.0;
  bool eta_branch_ok = false;  // eps_P / 750 < 1e-12
};

// Requires p <= the configured threshold (1e-4 by default).
ApproximationFactor approximation_factor(double p, const TSPConstants& c);

struct AuditItem {
  std::string name;
  double claimed = 0.0;
  double computed = 0.0;
  bool pass = false;
  std::string note;
};

struct AuditReport {
  std::vector<AuditItem> items;
  std::vector<std::string> external_assumptions;
  bool all_pass = true;
};

// Replays the appendix constant chains (expectation intervals -> deviation
// profile -> probability bound -> constant) and checks each claimed
// constant is reproduced or exceeded.
AuditReport appendix_bound_audit(const TSPConstants& c);

}  // namespace capbound
