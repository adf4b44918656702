#include "capbound/report.hpp"

#include <json.hpp>

namespace capbound {

using nlohmann::json;

namespace {

json optional_value(const std::optional<double>& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

}  // namespace

std::string to_json_string(const BoundReport& report, int indent) {
  json profile;
  profile["n"] = report.profile.n;
  profile["eps"] = std::vector<double>(
      report.profile.eps.data(), report.profile.eps.data() + report.profile.eps.size());
  profile["delta"] = std::vector<double>(
      report.profile.delta.data(),
      report.profile.delta.data() + report.profile.delta.size());
  profile["valid"] = report.profile.valid;

  json j;
  j["exact"] = optional_value(report.exact);
  if (!report.exact_kind.empty()) j["exact_kind"] = report.exact_kind;
  if (!report.status.empty()) j["status"] = report.status;
  j["two_term"] = optional_value(report.two_term);
  j["one_term"] = optional_value(report.one_term);
  j["simple"] = optional_value(report.simple);
  j["coeff_bound"] = optional_value(report.coeff_bound);
  j["baseline_kko"] = optional_value(report.baseline_kko);
  if (report.prefactor) j["prefactor"] = *report.prefactor;
  if (report.strong) j["strong"] = *report.strong;
  if (report.lite) j["lite"] = *report.lite;
  if (report.headline) j["headline"] = *report.headline;
  j["profile"] = profile;
  if (report.note) j["note"] = *report.note;
  return j.dump(indent);
}

}  // namespace capbound
