#pragma once

// Flat key=value configuration with dotted sections. '#' starts a comment;
// blank lines are ignored. Unknown keys and malformed lines are reported
// with their line number.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rml/errors.hpp"
#include "rml/laws.hpp"
#include "rml/models.hpp"
#include "rml/montecarlo.hpp"
#include "rml/processes.hpp"

namespace rml {

struct ConfigKey {
  std::string_view name;
  std::string_view help;
};

// Every accepted key. Keys irrelevant to a subcommand are ignored by it.
inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"seed", "master seed; all randomness derives from it"},
      {"process.kind", "iid_pairs | ar1_pairs | ma_pairs | iid_regression | ar1_regression | censored"},
      {"process.ar_coef", "AR(1) coefficient a, |a| < 1"},
      {"process.u.law", "constant | uniform | exponential | discrete"},
      {"process.u.a", "constant value, uniform lower end or exponential mean"},
      {"process.u.b", "uniform upper end"},
      {"process.u.values", "discrete atoms (comma list)"},
      {"process.u.probs", "discrete probabilities (comma list)"},
      {"process.v.mean", "location of V"},
      {"process.v.slope", "V = mean + slope (U - E U) + noise"},
      {"process.noise.law", "none | normal | student_t | discrete"},
      {"process.noise.scale", "sd (normal) or scale (student_t)"},
      {"process.noise.dof", "student_t degrees of freedom"},
      {"process.noise.values", "discrete noise atoms"},
      {"process.noise.probs", "discrete noise probabilities"},
      {"process.ma.decay", "moving-average coefficient decay theta"},
      {"process.ma.truncation", "moving-average truncation lag"},
      {"process.ma.two_sided", "true | false"},
      {"process.censoring.keep_prob", "P(C_i = 1)"},
      {"process.censoring.innovation_sd", "AR(1) innovation sd of the latent series"},
      {"model.d", "design dimension"},
      {"model.design", "uniform | normal"},
      {"model.response", "sin | constant"},
      {"model.constant", "value of the constant response"},
      {"model.noise_sd", "response noise sd"},
      {"model.rho", "declared regularity"},
      {"model.region.lo", "lower end of the evaluation box"},
      {"model.region.hi", "upper end of the evaluation box"},
      {"estimator", "weighted_sum | nw_pointwise | nw_sup"},
      {"p", "norm order"},
      {"q", "moment order of the weights (optional, q > p)"},
      {"extra_p", "further norm orders reported (comma list)"},
      {"n_grid", "increasing sample sizes (comma list)"},
      {"M", "replications per sample size"},
      {"x", "evaluation point (comma list of d coordinates)"},
      {"kernel", "epanechnikov | triangle | quartic"},
      {"bandwidth.rule", "pointwise | uniform | fixed"},
      {"bandwidth.C", "bandwidth constant (the width itself when fixed)"},
      {"target", "centered | truth"},
      {"tolerance", "slope tolerance"},
      {"bias.h_max", "largest bandwidth of the bias sweep"},
      {"bias.levels", "number of halvings in the bias sweep"},
      {"bias.tolerance", "allowed |slope - rho|"},
      {"censored.n", "sample size"},
      {"censored.ell_max", "largest lag"},
      {"censored.replications", "independent paths used for the standard error"},
      {"censored.denominator", "squared_mean | second_moment"},
      {"clt.p_prime", "order p' < p of the normalized norm"},
      {"clt.tolerance", "allowed relative gap"},
  };
  return keys;
}

class Config {
public:
  static Config parse(std::istream& in, std::string source = "<config>") {
    Config cfg;
    cfg.source_ = std::move(source);
    std::set<std::string_view> known;
    for (const auto& k : config_keys()) known.insert(k.name);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const auto t = trim(line);
      if (t.empty()) continue;
      const auto eq = t.find('=');
      if (eq == std::string_view::npos) {
        throw config_error(cfg.where(lineno) + "expected key = value");
      }
      const std::string key(trim(t.substr(0, eq)));
      const std::string value(trim(t.substr(eq + 1)));
      if (key.empty()) throw config_error(cfg.where(lineno) + "empty key");
      if (!known.count(key)) throw config_error(cfg.where(lineno) + "unknown key '" + key + "'");
      if (value.empty()) throw config_error(cfg.where(lineno) + "empty value for '" + key + "'");
      if (cfg.entries_.count(key)) throw config_error(cfg.where(lineno) + "duplicate key '" + key + "'");
      cfg.entries_[key] = {value, lineno};
    }
    return cfg;
  }

  static Config parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    return parse(in, path);
  }

  [[nodiscard]] bool has(const std::string& key) const { return entries_.count(key) != 0; }

  [[nodiscard]] std::string str(const std::string& key) const { return entry(key).value; }
  [[nodiscard]] std::string str(const std::string& key, const std::string& def) const {
    return has(key) ? str(key) : def;
  }

  [[nodiscard]] double num(const std::string& key) const {
    const auto& e = entry(key);
    return to_double(e.value, key, e.line);
  }
  [[nodiscard]] double num(const std::string& key, double def) const { return has(key) ? num(key) : def; }

  [[nodiscard]] long long integer(const std::string& key) const {
    const auto& e = entry(key);
    return to_int(e.value, key, e.line);
  }
  [[nodiscard]] long long integer(const std::string& key, long long def) const {
    return has(key) ? integer(key) : def;
  }

  [[nodiscard]] bool boolean(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const auto& e = entry(key);
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw config_error(where(e.line) + "'" + key + "' must be true or false");
  }

  [[nodiscard]] std::vector<double> nums(const std::string& key) const {
    const auto& e = entry(key);
    std::vector<double> out;
    for (const auto& part : split(e.value)) out.push_back(to_double(part, key, e.line));
    return out;
  }
  [[nodiscard]] std::vector<double> nums(const std::string& key, std::vector<double> def) const {
    return has(key) ? nums(key) : def;
  }

  [[nodiscard]] std::vector<long long> integers(const std::string& key) const {
    const auto& e = entry(key);
    std::vector<long long> out;
    for (const auto& part : split(e.value)) out.push_back(to_int(part, key, e.line));
    return out;
  }

  [[nodiscard]] int line_of(const std::string& key) const { return has(key) ? entries_.at(key).line : 0; }
  [[nodiscard]] const std::string& source() const { return source_; }

  // Rethrows a domain error raised while interpreting `key` as a config
  // error pointing at its line.
  template <class F>
  auto at_key(const std::string& key, F&& f) const -> decltype(f()) {
    try {
      return f();
    } catch (const config_error&) {
      throw;
    } catch (const error& e) {
      throw config_error(where(line_of(key)) + key + ": " + e.what());
    }
  }

private:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  static std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string_view rest(s);
    while (true) {
      const auto comma = rest.find(',');
      out.emplace_back(trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  [[nodiscard]] std::string where(int line) const {
    return source_ + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": ";
  }

  [[nodiscard]] const Entry& entry(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw config_error(where(0) + "missing required key '" + key + "'");
    return it->second;
  }

  [[nodiscard]] double to_double(const std::string& v, const std::string& key, int line) const {
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end || v.empty()) {
      throw config_error(where(line) + "'" + key + "' expects a number, got '" + v + "'");
    }
    return out;
  }

  [[nodiscard]] long long to_int(const std::string& v, const std::string& key, int line) const {
    // Accept plain integers and exact powers written as 2^k.
    if (const auto caret = v.find('^'); caret != std::string::npos) {
      const long long base = to_int(v.substr(0, caret), key, line);
      const long long exp = to_int(v.substr(caret + 1), key, line);
      if (exp < 0 || exp > 62) throw config_error(where(line) + "'" + key + "' exponent out of range");
      long long r = 1;
      for (long long i = 0; i < exp; ++i) r *= base;
      return r;
    }
    long long out = 0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, out);
    if (res.ec != std::errc() || res.ptr != end || v.empty()) {
      throw config_error(where(line) + "'" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
  }

  std::string source_;
  std::map<std::string, Entry> entries_;
};

inline MarginalLaw u_law_from(const Config& c) {
  return c.at_key("process.u.law", [&] {
    const auto law = c.str("process.u.law", "constant");
    if (law == "constant") return MarginalLaw::constant(c.num("process.u.a", 1.0));
    if (law == "uniform") return MarginalLaw::uniform(c.num("process.u.a"), c.num("process.u.b"));
    if (law == "exponential") return MarginalLaw::exponential(c.num("process.u.a", 1.0));
    if (law == "discrete") return MarginalLaw::discrete(c.nums("process.u.values"), c.nums("process.u.probs"));
    throw invalid_spec("unknown law '" + law + "'");
  });
}

inline NoiseLaw noise_law_from(const Config& c) {
  return c.at_key("process.noise.law", [&] {
    const auto law = c.str("process.noise.law", "normal");
    if (law == "none") return NoiseLaw::none();
    if (law == "normal") return NoiseLaw::normal(c.num("process.noise.scale", 1.0));
    if (law == "student_t") {
      return NoiseLaw::student_t(static_cast<int>(c.integer("process.noise.dof")),
                                 c.num("process.noise.scale", 1.0));
    }
    if (law == "discrete") {
      return NoiseLaw::discrete(c.nums("process.noise.values"), c.nums("process.noise.probs"));
    }
    throw invalid_spec("unknown noise law '" + law + "'");
  });
}

inline RegressionModel regression_model_from(const Config& c) {
  RegressionModel m;
  m.d = static_cast<int>(c.integer("model.d", 1));
  m.design = c.at_key("model.design", [&] {
    const auto s = c.str("model.design", "uniform");
    if (s == "uniform") return DesignLaw::uniform01;
    if (s == "normal") return DesignLaw::normal;
    throw invalid_spec("unknown design '" + s + "'");
  });
  m.response = c.at_key("model.response", [&] {
    const auto s = c.str("model.response", "sin");
    if (s == "sin") return ResponseKind::sine;
    if (s == "constant") return ResponseKind::constant;
    throw invalid_spec("unknown response '" + s + "'");
  });
  m.response_constant = c.num("model.constant", 0.0);
  m.noise_sd = c.num("model.noise_sd", m.noise_sd);
  m.rho = c.num("model.rho", m.rho);
  m.region.lo = c.num("model.region.lo", m.region.lo);
  m.region.hi = c.num("model.region.hi", m.region.hi);
  c.at_key("model.d", [&] { m.validate(); });
  return m;
}

inline ProcessSpec process_from(const Config& c) {
  const auto kind = c.at_key("process.kind", [&] { return process_kind_from_string(c.str("process.kind")); });
  const double a = c.num("process.ar_coef", 0.5);
  // Constructors validate; failures point at the process.kind line.
  return c.at_key("process.kind", [&] {
    ProcessSpec spec;
    if (is_pair_kind(kind)) {
      PairModel pm;
      pm.u = u_law_from(c);
      pm.v_mean = c.num("process.v.mean", 0.0);
      pm.v_slope = c.num("process.v.slope", 0.0);
      pm.noise = noise_law_from(c);
      if (kind == ProcessKind::iid_pairs) spec = make_iid_pairs(pm);
      if (kind == ProcessKind::ar1_pairs) spec = make_ar1_pairs(pm, a);
      if (kind == ProcessKind::ma_pairs) {
        MovingAverage ma;
        ma.decay = c.num("process.ma.decay", ma.decay);
        ma.truncation = static_cast<int>(c.integer("process.ma.truncation", ma.truncation));
        ma.two_sided = c.boolean("process.ma.two_sided", ma.two_sided);
        spec = make_ma_pairs(pm, ma);
      }
    } else if (kind == ProcessKind::censored) {
      spec = make_censored(a, c.num("process.censoring.innovation_sd", 1.0),
                           c.num("process.censoring.keep_prob"));
    } else {
      const auto model = regression_model_from(c);
      spec = kind == ProcessKind::iid_regression ? make_iid_regression(model) : make_ar1_regression(model, a);
    }
    return spec;
  });
}

inline ExperimentConfig experiment_from(const Config& c) {
  ExperimentConfig e;
  e.process = process_from(c);
  e.estimator = c.at_key("estimator", [&] { return estimator_from_string(c.str("estimator")); });
  e.p = c.num("p", 2.0);
  e.extra_p = c.nums("extra_p", {});
  if (c.has("q")) {
    e.params = c.at_key("q", [&] {
      const auto rs = thm1_exponents(e.p, c.num("q"));
      return validate_params(e.p, c.num("q"), rs.r, rs.s);
    });
  }
  e.n_grid = c.integers("n_grid");
  const long long M = c.integer("M");
  if (M < 1) throw config_error(c.source() + ":" + std::to_string(c.line_of("M")) + ": M must be >= 1");
  e.M = static_cast<std::size_t>(M);
  e.master_seed = static_cast<std::uint64_t>(c.integer("seed"));
  e.x = c.nums("x", std::vector<double>(static_cast<std::size_t>(e.process.regression.d), 0.5));
  e.bandwidth = c.at_key("bandwidth.rule",
                         [&] { return bandwidth_rule_from_string(c.str("bandwidth.rule", "pointwise")); });
  e.bandwidth_c = c.num("bandwidth.C", 1.0);
  e.kernel = c.at_key("kernel", [&] { return kernel_name_from_string(c.str("kernel", "epanechnikov")); });
  e.target = c.at_key("target", [&] { return target_from_string(c.str("target", "centered")); });
  if (c.has("tolerance")) e.tolerance = c.num("tolerance");
  c.at_key("n_grid", [&] { e.validate(); });
  return e;
}

}  // namespace rml
