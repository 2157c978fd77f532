// Batch runner for the ratio/regression moment-bound experiments.
//
// Exit codes: 0 success, 1 scientific check failed, 2 invalid input,
// 3 degenerate experiment.

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rml/rml.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit : int { ok = 0, check_failed = 1, invalid_input = 2, degenerate = 3 };

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rml::config_error("cannot read '" + path + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

// Collects output files and writes the manifest last.
class OutputSet {
public:
  OutputSet(std::string command, std::string out_dir, std::string config_path)
      : dir_(std::move(out_dir)) {
    manifest_.command = std::move(command);
    manifest_.config_path = std::move(config_path);
    manifest_.started = utc_now();
    fs::create_directories(dir_);
    stem_ = manifest_.config_path.empty() ? manifest_.command
                                          : fs::path(manifest_.config_path).stem().string();
    if (!manifest_.config_path.empty()) manifest_.config_digest = sha256_file(manifest_.config_path);
  }

  void set_seed(std::uint64_t s) { manifest_.master_seed = s; }

  std::string write(const std::string& suffix, const std::function<void(std::ostream&)>& body) {
    const auto path = (fs::path(dir_) / (stem_ + suffix)).string();
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write '" + path + "'");
    body(os);
    manifest_.outputs.push_back(path);
    return path;
  }

  int finish(int code) {
    manifest_.exit_code = code;
    manifest_.finished = utc_now();
    const auto path = (fs::path(dir_) / (stem_ + "_manifest.json")).string();
    std::ofstream os(path, std::ios::binary);
    os << manifest_.to_json().dump(2) << '\n';
    std::cout << "manifest: " << path << '\n';
    return code;
  }

private:
  std::string dir_;
  std::string stem_;
  rml::RunManifest manifest_;
};

// Maps library errors onto the exit-code contract.
int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const rml::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return invalid_input;
  } catch (const rml::invalid_params& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return invalid_input;
  } catch (const rml::invalid_spec& e) {
    std::cerr << "invalid specification: " << e.what() << '\n';
    return invalid_input;
  } catch (const rml::unsupported_combination& e) {
    std::cerr << "unsupported combination: " << e.what() << '\n';
    return invalid_input;
  } catch (const rml::unsupported_kernel& e) {
    std::cerr << "unsupported kernel: " << e.what() << '\n';
    return invalid_input;
  } catch (const rml::error& e) {
    std::cerr << "degenerate experiment: " << e.what() << '\n';
    return degenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return degenerate;
  }
}

std::string fmt(double v) { return rml::format_number(v); }

// ---- params ---------------------------------------------------------------

struct ParamsArgs {
  double p = 0, q = 0;
  std::optional<double> r, s, rho;
  std::optional<int> d;
  std::optional<std::string> dep, setting, variant;
  std::optional<double> decay, aux;
};

int cmd_params(const ParamsArgs& a) {
  if (!(a.p > 0.0)) throw rml::invalid_params("p > 0 violated");
  if (!(a.q > a.p)) throw rml::invalid_params("q > p violated (p = " + fmt(a.p) + ", q = " + fmt(a.q) + ")");
  if (a.r.has_value() != a.s.has_value()) throw rml::invalid_params("--r and --s go together");
  if (a.d.has_value() != a.rho.has_value()) throw rml::invalid_params("--d and --rho go together");
  rml::Exponents e{a.p, a.q, 0, 0};
  if (a.r) {
    e.r = *a.r;
    e.s = *a.s;
    if (!(e.r > 0.0 && e.s > 0.0)) throw rml::invalid_params("r > 0 and s > 0 violated");
  } else {
    const auto rs = rml::thm1_exponents(a.p, a.q);
    e.r = rs.r;
    e.s = rs.s;
  }
  std::cout << "p = " << fmt(e.p) << "\nq = " << fmt(e.q) << "\nr = " << fmt(e.r) << (a.r ? "" : " (weighted-sum choice)")
            << "\ns = " << fmt(e.s) << (a.s ? "" : " (weighted-sum choice)") << "\nalpha = " << fmt(e.alpha())
            << "\nbeta = " << fmt(e.beta()) << '\n';

  const bool regression = a.d.has_value();
  try {
    rml::validate_params(e.p, e.q, e.r, e.s);
    std::cout << "moment bound hypotheses: satisfied\n";
  } catch (const rml::invalid_params& err) {
    if (!regression) throw;
    std::cout << "moment bound hypotheses: not satisfied (" << err.what() << ")\n";
  }

  int code = ok;
  if (regression) {
    const auto rep = rml::regression_feasible(e, *a.d, *a.rho);
    std::cout << "window condition: " << (rep.feasible ? "satisfied" : "violated") << " (threshold "
              << fmt(rep.threshold) << ", rho " << fmt(*a.rho) << ")\n";
    if (!rep.feasible) code = check_failed;
  }
  if (a.dep) {
    rml::DependenceSpec dep;
    const std::string k = *a.dep;
    if (k == "iid") dep.kind = rml::DependenceKind::iid;
    else if (k == "strong_mixing") dep.kind = rml::DependenceKind::strong_mixing;
    else if (k == "absolute_regularity") dep.kind = rml::DependenceKind::absolute_regularity;
    else if (k == "causal_gamma") dep.kind = rml::DependenceKind::causal_gamma;
    else if (k == "lambda_weak") dep.kind = rml::DependenceKind::lambda_weak;
    else throw rml::invalid_params("unknown dependence kind '" + k + "'");
    dep.decay_exponent = a.decay.value_or(0.0);
    dep.aux_exponent = a.aux;
    if (a.variant) {
      if (*a.variant == "first") dep.variant = rml::ConditionSet::first;
      else if (*a.variant == "second") dep.variant = rml::ConditionSet::second;
      else throw rml::invalid_params("variant must be first or second");
    }
    rml::Setting setting = regression ? rml::Setting::pointwise : rml::Setting::weighted_sum;
    if (a.setting) {
      if (*a.setting == "weighted_sum") setting = rml::Setting::weighted_sum;
      else if (*a.setting == "pointwise") setting = rml::Setting::pointwise;
      else if (*a.setting == "uniform") setting = rml::Setting::uniform;
      else throw rml::invalid_params("unknown setting '" + *a.setting + "'");
    }
    const auto rep = rml::check_dependence(dep, e, setting, a.d.value_or(1), a.rho.value_or(1.0));
    std::cout << "dependence: " << rml::to_string(rep.proposition) << " threshold " << fmt(rep.threshold)
              << ", supplied " << fmt(rep.supplied) << ": " << (rep.satisfied ? "satisfied" : "violated") << '\n';
    if (rep.window_bound) std::cout << "  window exponent bound: " << fmt(*rep.window_bound) << '\n';
    for (const auto& w : rep.warnings) std::cout << "  warning: " << w << '\n';
    if (!rep.satisfied) code = check_failed;
  }
  return code;
}

// ---- run ------------------------------------------------------------------

int cmd_run(const std::string& config_path, const std::string& out_dir) {
  const auto cfg = rml::Config::load(config_path);
  const auto exp = rml::experiment_from(cfg);
  OutputSet out("run", out_dir, config_path);
  out.set_seed(exp.master_seed);
  try {
    const auto table = rml::replicate(exp);
    const auto fit = rml::fit_rate(exp, table);
    const auto csv = out.write("_norms.csv", [&](std::ostream& os) { rml::write_norm_table_csv(os, table); });
    json j;
    j["estimator"] = std::string(rml::to_string(exp.estimator));
    j["process"] = std::string(rml::to_string(exp.process.kind));
    j["p"] = exp.p;
    j["M"] = exp.M;
    j["seed"] = exp.master_seed;
    if (exp.estimator != rml::Estimator::weighted_sum) {
      j["bandwidth_rule"] = std::string(rml::to_string(exp.bandwidth));
      j["bandwidth_C"] = exp.bandwidth_c;
      j["target"] = std::string(rml::to_string(exp.target));
    }
    j["fit"] = rml::rate_fit_json(fit);
    const auto js = out.write("_summary.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    for (const auto& p : fit.points) {
      std::cout << "n = " << p.n << "  norm = " << fmt(p.norm) << "  stderr = " << fmt(p.stderr_)
                << "  excluded = " << p.excluded << '\n';
    }
    std::cout << "slope = " << fmt(fit.slope) << " +- " << fmt(fit.slope_stderr) << "  expected "
              << fmt(-fit.theoretical) << " +- " << fmt(fit.tolerance) << "  " << (fit.pass ? "PASS" : "FAIL")
              << "\nwrote " << csv << ", " << js << '\n';
    return out.finish(fit.pass ? ok : check_failed);
  } catch (const rml::too_many_exclusions& e) {
    std::cerr << "degenerate experiment: " << e.what() << '\n';
    return out.finish(degenerate);
  }
}

// ---- audit ----------------------------------------------------------------

int report_audit(const std::string& kind, const rml::AuditSummary& s, const std::string& out_dir,
                 const std::function<void(std::ostream&)>& csv = {}) {
  OutputSet out("audit_" + kind, out_dir, "");
  json j = rml::audit_json(kind, s);
  out.write("_summary.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  if (csv) out.write("_trials.csv", csv);
  std::cout << kind << ": trials " << s.trials << ", evaluated " << s.evaluated << ", excluded " << s.excluded
            << ", violations " << s.violations << ", min relative slack " << fmt(s.min_relative_slack) << '\n';
  if (s.first_offending_trial) std::cout << "first offending trial: " << *s.first_offending_trial << '\n';
  return out.finish(s.passed() ? ok : check_failed);
}

int cmd_audit_kernel(const std::string& name, int d, int order, const std::string& out_dir) {
  const auto k = rml::make_kernel(name, d);
  const auto rep = rml::verify_order(k, order);
  OutputSet out("audit_kernel", out_dir, "");
  json j;
  j["kernel"] = std::string(rml::to_string(k.name()));
  j["d"] = d;
  j["integral"] = rep.integral;
  j["verified_order"] = rep.verified_order;
  j["normalized"] = rep.normalized;
  j["vanishing_ok"] = rep.vanishing_ok;
  j["lipschitz"] = k.lipschitz_const();
  out.write("_summary.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  std::cout << "kernel " << rml::to_string(k.name()) << " d = " << d << ": integral " << fmt(rep.integral)
            << ", verified order " << rep.verified_order << (rep.ok() ? " confirmed" : " NOT confirmed") << '\n';
  const bool pass = rep.ok() && rep.verified_order <= 2;
  return out.finish(pass ? ok : check_failed);
}

// ---- bias -----------------------------------------------------------------

int cmd_bias(const std::string& config_path, const std::string& out_dir) {
  const auto cfg = rml::Config::load(config_path);
  const auto model = rml::regression_model_from(cfg);
  const auto kernel = cfg.at_key("kernel", [&] { return rml::make_kernel(cfg.str("kernel", "epanechnikov"), model.d); });
  const auto x = cfg.nums("x", std::vector<double>(static_cast<std::size_t>(model.d), 0.3));
  if (static_cast<int>(x.size()) != model.d) throw rml::config_error(config_path + ": x must have d coordinates");
  const double h_max = cfg.num("bias.h_max", 0.4);
  const int levels = static_cast<int>(cfg.integer("bias.levels", 6));
  const double tol = cfg.num("bias.tolerance", 0.2);
  OutputSet out("bias", out_dir, config_path);
  const auto sweep = cfg.at_key("bias.h_max", [&] { return rml::bias_sweep(model, kernel, x, h_max, levels); });
  out.write("_bias.csv", [&](std::ostream& os) {
    os << "h,bias\n";
    for (std::size_t j = 0; j < sweep.h.size(); ++j) os << fmt(sweep.h[j]) << ',' << fmt(sweep.bias[j]) << '\n';
  });
  json j;
  j["rho"] = model.rho;
  j["exact_zero"] = sweep.exact_zero;
  bool pass = true;
  if (sweep.exact_zero) {
    std::cout << "bias is exactly 0 at every bandwidth\n";
  } else {
    pass = std::abs(sweep.slope - model.rho) <= tol;
    j["slope"] = sweep.slope;
    j["slope_stderr"] = sweep.slope_stderr;
    j["tolerance"] = tol;
    for (std::size_t k = 0; k < sweep.h.size(); ++k) std::cout << "h = " << fmt(sweep.h[k]) << "  bias = " << fmt(sweep.bias[k]) << '\n';
    std::cout << "slope = " << fmt(sweep.slope) << "  expected " << fmt(model.rho) << " +- " << fmt(tol) << "  "
              << (pass ? "PASS" : "FAIL") << '\n';
  }
  j["pass"] = pass;
  out.write("_summary.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return out.finish(pass ? ok : check_failed);
}

// ---- censored -------------------------------------------------------------

int cmd_censored(const std::string& config_path, const std::string& out_dir) {
  const auto cfg = rml::Config::load(config_path);
  const auto spec = rml::process_from(cfg);
  if (spec.kind != rml::ProcessKind::censored) throw rml::config_error(config_path + ": process.kind must be censored");
  const auto n = static_cast<std::size_t>(cfg.integer("censored.n", 1000000));
  const int ell_max = static_cast<int>(cfg.integer("censored.ell_max", 5));
  const auto reps = static_cast<std::size_t>(cfg.integer("censored.replications", 32));
  if (reps < 2) throw rml::config_error(config_path + ": censored.replications must be >= 2");
  const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  const auto rule = cfg.at_key("censored.denominator", [&] {
    const auto s = cfg.str("censored.denominator", "squared_mean");
    if (s == "squared_mean") return rml::CensoredDenominator::squared_mean;
    if (s == "second_moment") return rml::CensoredDenominator::second_moment;
    throw rml::invalid_spec("unknown denominator '" + s + "'");
  });
  OutputSet out("censored", out_dir, config_path);
  out.set_seed(seed);
  std::vector<std::vector<double>> est(reps), uncensored(reps);
  int code = ok;
  try {
    rml::parallel_for(reps, rml::thread_count_from_env(), [&](std::size_t j) {
      const auto path = rml::simulate(spec, n, {seed, static_cast<std::uint32_t>(j)});
      est[j] = rml::censored_cov_estimate(path, ell_max, rule);
      for (int l = 1; l <= ell_max; ++l) {
        uncensored[j].push_back(rml::empirical_autocovariance(path.latent, static_cast<std::size_t>(l)));
      }
    });
  } catch (const rml::degenerate_denominator& e) {
    std::cerr << "degenerate experiment: " << e.what() << '\n';
    return out.finish(degenerate);
  }
  const bool full = spec.censoring.keep_prob == 1.0;
  json rows = json::array();
  bool pass = true;
  std::ostringstream csv;
  csv << "ell,truth,estimate,stderr,z,pass\n";
  for (int l = 0; l < ell_max; ++l) {
    rml::CompensatedSum s;
    for (const auto& e : est) s.add(e[static_cast<std::size_t>(l)]);
    const double mean = s.value() / static_cast<double>(reps);
    rml::CompensatedSum ss;
    for (const auto& e : est) ss.add((e[static_cast<std::size_t>(l)] - mean) * (e[static_cast<std::size_t>(l)] - mean));
    const double se = std::sqrt(ss.value() / static_cast<double>(reps - 1) / static_cast<double>(reps));
    const double truth = spec.gamma_x(l + 1);
    const double z = se > 0.0 ? (mean - truth) / se : (mean == truth ? 0.0 : INFINITY);
    bool lag_ok = std::abs(z) <= 3.0;
    if (full) {
      // No censoring: the estimate must reproduce the uncensored covariance exactly.
      for (std::size_t j = 0; j < reps; ++j) lag_ok = lag_ok && est[j][static_cast<std::size_t>(l)] == uncensored[j][static_cast<std::size_t>(l)];
    }
    pass = pass && lag_ok;
    csv << l + 1 << ',' << fmt(truth) << ',' << fmt(mean) << ',' << fmt(se) << ',' << fmt(z) << ',' << (lag_ok ? 1 : 0) << '\n';
    rows.push_back({{"ell", l + 1}, {"truth", truth}, {"estimate", mean}, {"stderr", se}, {"z", z}, {"pass", lag_ok}});
    std::cout << "ell = " << l + 1 << "  truth " << fmt(truth) << "  estimate " << fmt(mean) << "  se " << fmt(se)
              << "  z " << fmt(z) << (lag_ok ? "" : "  FAIL") << '\n';
  }
  out.write("_censored.csv", [&](std::ostream& os) { os << csv.str(); });
  json j;
  j["n"] = n;
  j["replications"] = reps;
  j["keep_prob"] = spec.censoring.keep_prob;
  j["ar_coef"] = spec.ar_coef;
  j["lags"] = rows;
  j["pass"] = pass;
  out.write("_summary.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  std::cout << (pass ? "PASS" : "FAIL") << '\n';
  code = pass ? ok : check_failed;
  return out.finish(code);
}

// ---- clt ------------------------------------------------------------------

int cmd_clt(const std::string& config_path, const std::string& out_dir) {
  const auto cfg = rml::Config::load(config_path);
  const auto exp = rml::experiment_from(cfg);
  const double p_prime = cfg.num("clt.p_prime", 1.0);
  const double tol = cfg.num("clt.tolerance", 0.05);
  OutputSet out("clt", out_dir, config_path);
  out.set_seed(exp.master_seed);
  const auto c = cfg.at_key("clt.p_prime", [&] { return rml::clt_check(exp, p_prime); });
  const bool pass = c.relative_gap <= tol;
  json j;
  j["n"] = c.n;
  j["p_prime"] = c.p_prime;
  j["lhs"] = c.lhs;
  j["lhs_stderr"] = c.lhs_stderr;
  j["limit"] = c.limit;
  j["sigma"] = c.sigma;
  j["relative_gap"] = c.relative_gap;
  j["tolerance"] = tol;
  j["excluded"] = c.excluded;
  j["pass"] = pass;
  out.write("_summary.json", [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  std::cout << "sqrt(n) ||Delta_n||_" << fmt(p_prime) << " = " << fmt(c.lhs) << " +- " << fmt(c.lhs_stderr)
            << "  limit " << fmt(c.limit) << "  relative gap " << fmt(c.relative_gap) << "  "
            << (pass ? "PASS" : "FAIL") << '\n';
  return out.finish(pass ? ok : check_failed);
}

std::string keys_help() {
  std::ostringstream os;
  os << "\nConfig keys (key = value, '#' comments):\n";
  for (const auto& k : rml::config_keys()) os << "  " << std::left << std::setw(34) << k.name << k.help << '\n';
  os << "\nExit codes: 0 success, 1 check failed, 2 invalid input, 3 degenerate experiment.\n"
        "RML_THREADS caps worker threads (0 or unset = all cores).\n";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Moment bounds for ratio and Nadaraya-Watson estimators: experiments and audits"};
  app.footer(keys_help());
  app.require_subcommand(1);
  app.fallthrough();  // --out may follow the subcommand
  std::string out_dir = "rml_out";
  app.add_option("--out", out_dir, "output directory")->capture_default_str();

  ParamsArgs pa;
  auto* params = app.add_subcommand("params", "exponent algebra and hypothesis verdicts");
  params->add_option("--p", pa.p, "norm order p")->required();
  params->add_option("--q", pa.q, "moment order q > p")->required();
  params->add_option("--r", pa.r, "moment order of U V");
  params->add_option("--s", pa.s, "moment order of V");
  params->add_option("--d", pa.d, "design dimension");
  params->add_option("--rho", pa.rho, "regularity");
  params->add_option("--dep", pa.dep, "iid | strong_mixing | absolute_regularity | causal_gamma | lambda_weak");
  params->add_option("--decay", pa.decay, "dependence decay exponent");
  params->add_option("--aux", pa.aux, "auxiliary exponent (r' or b)");
  params->add_option("--variant", pa.variant, "first | second");
  params->add_option("--setting", pa.setting, "weighted_sum | pointwise | uniform");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Monte Carlo rate experiment");
  run->add_option("config", config_path, "config file")->required();

  auto* audit = app.add_subcommand("audit", "randomized inequality audits and kernel checks");
  audit->require_subcommand(1);
  rml::Lemma2AuditOptions lo;
  auto* lemma2 = audit->add_subcommand("lemma2", "deterministic ratio inequality");
  lemma2->add_option("--trials", lo.trials)->capture_default_str();
  lemma2->add_option("--seed", lo.seed)->capture_default_str();
  lemma2->add_option("--alpha", lo.alphas, "alpha values in (0,1)");
  lemma2->add_option("--max-n", lo.max_n)->capture_default_str();
  bool lemma2_csv = false;
  lemma2->add_flag("--csv", lemma2_csv, "also write one row per trial");
  rml::PisierAuditOptions po;
  auto* pisier = audit->add_subcommand("pisier", "max |V|^e <= sum |V|^e");
  pisier->add_option("--trials", po.trials)->capture_default_str();
  pisier->add_option("--seed", po.seed)->capture_default_str();
  pisier->add_option("--length", po.length)->capture_default_str();
  std::string kname = "epanechnikov";
  int kd = 1, korder = 2;
  auto* kaudit = audit->add_subcommand("kernel", "normalization and order of a kernel");
  kaudit->add_option("--name", kname)->capture_default_str();
  kaudit->add_option("--d", kd)->capture_default_str();
  kaudit->add_option("--order", korder, "order to verify (1 or 2)")->capture_default_str();

  auto* bias = app.add_subcommand("bias", "quadrature bias sweep over h");
  bias->add_option("config", config_path)->required();
  auto* censored = app.add_subcommand("censored", "censored covariance against the truth");
  censored->add_option("config", config_path)->required();
  auto* clt = app.add_subcommand("clt", "normalized deviation norm against its Gaussian limit");
  clt->add_option("config", config_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return invalid_input;
  }

  return guarded([&]() -> int {
    if (*params) return cmd_params(pa);
    if (*run) return cmd_run(config_path, out_dir);
    if (*lemma2) {
      if (lo.trials < 1 || lo.max_n < 1 || lo.alphas.empty()) throw rml::invalid_params("trials, max-n and alpha must be nonempty");
      for (double a : lo.alphas) {
        if (!(a > 0.0 && a < 1.0)) throw rml::invalid_params("alpha must lie in (0, 1)");
      }
      lo.threads = rml::thread_count_from_env();
      const auto s = rml::run_lemma2_audits(lo);
      return report_audit("lemma2", s, out_dir,
                          lemma2_csv ? std::function<void(std::ostream&)>([&](std::ostream& os) { rml::write_lemma2_csv(os, lo); })
                                     : std::function<void(std::ostream&)>());
    }
    if (*pisier) {
      if (po.trials < 1 || po.length < 1) throw rml::invalid_params("trials and length must be >= 1");
      return report_audit("pisier", rml::run_pisier_audits(po), out_dir);
    }
    if (*kaudit) return cmd_audit_kernel(kname, kd, korder, out_dir);
    if (*bias) return cmd_bias(config_path, out_dir);
    if (*censored) return cmd_censored(config_path, out_dir);
    if (*clt) return cmd_clt(config_path, out_dir);
    return invalid_input;
  });
}
