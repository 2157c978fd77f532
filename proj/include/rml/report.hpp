#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rml/audits.hpp"
#include "rml/csv.hpp"
#include "rml/montecarlo.hpp"

namespace rml {

inline constexpr std::string_view tool_version = "1.0.0";

inline void write_norm_table_csv(std::ostream& os, const NormTable& t) {
  os << "n,p,norm,stderr,excluded,h_used\n";
  for (const auto& r : t.rows) {
    os << r.n << ',' << format_number(r.p) << ',' << format_number(r.norm) << ','
       << format_number(r.stderr_) << ',' << r.excluded << ',' << format_number(r.h_used) << '\n';
  }
}

inline nlohmann::ordered_json rate_fit_json(const RateFit& f) {
  nlohmann::ordered_json j;
  j["abscissa"] = std::string(to_string(f.abscissa));
  j["slope"] = f.slope;
  j["slope_stderr"] = f.slope_stderr;
  j["intercept"] = f.intercept;
  j["rss"] = f.rss;
  j["theoretical"] = -f.theoretical;
  j["tolerance"] = f.tolerance;
  j["pass"] = f.pass;
  auto& pts = j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : f.points) {
    pts.push_back({{"n", p.n}, {"abscissa", p.abscissa}, {"norm", p.norm}, {"stderr", p.stderr_},
                   {"excluded", p.excluded}});
  }
  return j;
}

inline nlohmann::ordered_json audit_json(std::string_view kind, const AuditSummary& s) {
  nlohmann::ordered_json j;
  j["audit"] = std::string(kind);
  j["trials"] = s.trials;
  j["evaluated"] = s.evaluated;
  j["excluded"] = s.excluded;
  j["violations"] = s.violations;
  j["min_relative_slack"] = s.min_relative_slack;
  if (s.first_offending_trial) j["first_offending_trial"] = *s.first_offending_trial;
  j["pass"] = s.passed();
  return j;
}

// One row per trial: seed, n, lhs, rhs, slack, alpha, excluded.
inline void write_lemma2_csv(std::ostream& os, const Lemma2AuditOptions& opt) {
  os << "seed,n,lhs,rhs,slack,alpha,excluded\n";
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const auto inst = make_lemma2_instance(opt, static_cast<std::uint32_t>(t));
    double sum_u = 0.0;
    for (double x : inst.u) sum_u += x;
    os << opt.seed << ':' << t << ',' << inst.u.size() << ',';
    if (!(sum_u > 0.0)) {
      os << "nan,nan,nan," << format_number(inst.alpha) << ",1\n";
      continue;
    }
    const auto a = lemma2_audit(inst.u, inst.v, inst.numerator_mean, inst.denominator_mean, inst.alpha);
    os << format_number(a.lhs) << ',' << format_number(a.rhs) << ',' << format_number(a.slack) << ','
       << format_number(a.alpha_used) << ",0\n";
  }
}

struct RunManifest {
  std::string command;
  std::string config_path;
  std::string config_digest;  // sha256 of the config file bytes
  std::uint64_t master_seed = 0;
  std::string started;
  std::string finished;
  std::vector<std::string> outputs;
  int exit_code = 0;

  [[nodiscard]] nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "rml";
    j["tool_version"] = std::string(tool_version);
    j["command"] = command;
    j["config"] = config_path;
    j["config_sha256"] = config_digest;
    j["master_seed"] = master_seed;
    j["started"] = started;
    j["finished"] = finished;
    j["outputs"] = outputs;
    j["exit_code"] = exit_code;
    return j;
  }
};

}  // namespace rml
