#pragma once

#include <optional>
#include <string>

#include "capbound/bounds.hpp"

namespace capbound {

// One verification run against a single (polynomial or measure, kappa)
// pair: the exact value when it is computable, every lower bound in the
// chain, and the deviation profile they came from. Null fields mean "not
// applicable here" (e.g. the coefficient-style bounds when the profile is
// invalid).
struct BoundReport {
  std::optional<double> exact;
  std::string exact_kind;  // "capacity" or "joint-probability"
  std::string status;      // capacity solver status, when applicable

  std::optional<double> two_term;
  std::optional<double> one_term;
  std::optional<double> simple;
  std::optional<double> coeff_bound;
  std::optional<double> baseline_kko;

  // Probability-side values (prefactor times the capacity-side bounds).
  std::optional<double> prefactor;
  std::optional<double> strong;
  std::optional<double> lite;
  std::optional<double> headline;

  DeviationProfile profile;
  std::optional<std::string> note;
};

std::string to_json_string(const BoundReport& report, int indent = 2);

}  // namespace capbound
