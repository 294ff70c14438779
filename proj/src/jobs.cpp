#include <chrono>
#include <climits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dcos/cli.hpp"
#include "dcos/errors.hpp"
#include "dcos/oracles.hpp"

namespace dcos {

namespace {

std::string join(const std::vector<double>& v, const char* sep = ", ") {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v[i]);
    s << (i ? sep : "") << buf;
  }
  return s.str();
}

std::string join(const std::vector<int>& v, const char* sep = ", ") {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? sep : "") << v[i];
  return s.str();
}

std::string join_exact(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

Eigen::MatrixXd covariance(const Config& c, std::size_t d) {
  Eigen::MatrixXd sigma(d, d);
  if (c.has("model.covariance")) {
    const auto rows = c.matrix("model.covariance");
    if (rows.size() == 1 && rows[0].size() == 1) {
      sigma = rows[0][0] * Eigen::MatrixXd::Identity(d, d);
      return sigma;
    }
    if (rows.size() != d) throw ConfigError("model.covariance: expected " + std::to_string(d) + " rows");
    for (std::size_t h = 0; h < d; ++h) {
      if (rows[h].size() != d) throw ConfigError("model.covariance: row has wrong length");
      for (std::size_t l = 0; l < d; ++l) sigma(h, l) = rows[h][l];
    }
    return sigma;
  }
  const auto vol = c.numbers("model.sigma", d);
  const double rho = c.number_or("model.correlation", 0.0);
  for (std::size_t h = 0; h < d; ++h)
    for (std::size_t l = 0; l < d; ++l) sigma(h, l) = (h == l ? 1.0 : rho) * vol[h] * vol[l];
  return sigma;
}

bool market_parameterization(const Config& c) {
  const std::string p = c.text_or("model.parameterization", c.has("market.spot") ? "market" : "raw");
  if (p != "market" && p != "raw") throw ConfigError("model.parameterization must be 'market' or 'raw'");
  return p == "market";
}

Payoff build_payoff(const Config& c, std::size_t d) {
  const std::string kind = c.text("payoff.kind");
  if (kind == "cdf") return CdfPayoff{c.numbers("payoff.y", d)};
  if (kind == "digital_put") return DigitalPutPayoff{c.numbers("payoff.strike", d)};
  if (kind == "basket_put") return BasketPutPayoff{c.number("payoff.strike")};
  if (kind == "vanilla_put") return VanillaPutPayoff{c.number("payoff.strike")};
  if (kind == "abs_moment") return AbsMomentPayoff{AbsBranch::positive_part};
  throw ConfigError("payoff.kind: unknown kind '" + kind + "'");
}

void emit(const JobOptions& options, const std::string& csv, std::ostream& out) {
  if (!options.out) {
    out << csv;
    return;
  }
  std::ofstream f(*options.out, std::ios::binary | std::ios::trunc);
  if (!f) throw ConfigError("cannot write '" + *options.out + "'");
  f << csv;
}

std::string key_value_csv(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string csv = "key,value\n";
  for (const auto& [k, v] : rows) csv += k + "," + v + "\n";
  return csv;
}

int plateau_check(const Solution& sol, const JobOptions& options, std::ostream& err) {
  if (!sol.selection || sol.selection->status != SelectionStatus::plateau) return 0;
  err << "cosctl: warning: Parseval gap reached a plateau at " << sol.selection->gap
      << " above the threshold " << sol.selection->threshold << "\n";
  return options.strict ? 3 : 0;
}

SolveOverrides overrides_from(const Config& c, std::size_t d) {
  SolveOverrides ov;
  if (c.has("cos.l")) ov.L = c.numbers("cos.l", d);
  if (c.has("cos.m")) ov.M = c.numbers("cos.m", d);
  if (c.has("cos.n")) {
    std::vector<int> n;
    for (double v : c.numbers("cos.n", d)) n.push_back(static_cast<int>(v));
    ov.N = n;
  }
  return ov;
}

std::optional<int> smoothness_order(const Config& c, const DampedDensity& dd) {
  if (!c.has("smoothness.s")) return std::nullopt;
  const std::string s = c.text("smoothness.s");
  if (s == "max") {
    const int J = smoothness_limit(dd);
    if (J == INT_MAX) throw ConfigError("smoothness.s = max needs a model with polynomial decay");
    return J;
  }
  return static_cast<int>(c.integer("smoothness.s"));
}

void describe(const Solution& sol, std::ostream& out, bool with_value) {
  if (with_value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", sol.value);
    out << "value = " << buf << "\n";
  }
  out << "alpha = " << join(sol.dd.alpha()) << "\n";
  out << "M = " << join(sol.geometry.M) << "\n";
  out << "L = " << join(sol.geometry.L) << "\n";
  out << "N = " << join(sol.N) << "\n";
  if (with_value) {
    for (const auto& [k, v] : sol.result.diagnostics) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g", v);
      out << k << " = " << buf << "\n";
    }
    out << "cos_time_s = " << sol.result.wall_time.count() << "\n";
  }
}

// one row per damping factor (a, ..., a); closed-form error for uncorrelated normal digitals
int run_sweep(const JobConfig& job, Problem problem, std::ostream& out) {
  const auto& c = job.config;
  const std::size_t d = problem.model->dimension();
  const auto tol = build_tolerance(c);
  const EngineOptions eo{job.options.threads};
  std::optional<double> reference;
  const auto* normal = dynamic_cast<const NormalModel*>(problem.model.get());
  const auto* digital = std::get_if<DigitalPutPayoff>(&problem.payoff);
  if (normal && digital) {
    std::vector<double> y;
    for (double k : digital->strike) y.push_back(std::log(k));
    try {
      reference = normal_cdf_closed_form(*normal, y);
      if (problem.market) reference = *reference * std::exp(-problem.market->rate * problem.market->maturity);
    } catch (const CorrelatedNotSupported&) {
    }
  }
  std::string csv = "alpha,value,reference,abs_error\n";
  for (double a : c.numbers("damping.sweep")) {
    problem.alpha.assign(d, a);
    const auto sol = solve(problem, tol, overrides_from(c, d), eo);
    csv += format_double(a) + "," + format_double(sol.value) + "," +
           (reference ? format_double(*reference) : "") + "," +
           (reference ? format_double(std::abs(sol.value - *reference)) : "") + "\n";
  }
  emit(job.options, csv, out);
  return 0;
}

int run_value(const JobConfig& job, std::ostream& out, std::ostream& err, bool discount) {
  const auto& c = job.config;
  const std::size_t d = config_dimension(c);
  auto problem = build_problem(c, d);
  if (c.has("damping.sweep")) return run_sweep(job, problem, out);
  if (job.command == Command::cdf && !std::holds_alternative<CdfPayoff>(problem.payoff) &&
      !std::holds_alternative<DigitalPutPayoff>(problem.payoff))
    throw ConfigError("cdf command needs payoff.kind = cdf or digital_put");
  if (!discount) problem.market.reset();
  const auto tol = build_tolerance(c);
  const EngineOptions eo{job.options.threads};
  const auto sol = solve(problem, tol, overrides_from(c, d), eo);
  std::vector<std::pair<std::string, std::string>> rows = {
      {"value", format_double(sol.value)},
      {"M", join_exact(sol.geometry.M)},
      {"L", join_exact(sol.geometry.L)},
      {"N", join(sol.N, ";")},
      {"alpha", join_exact(sol.dd.alpha())}};
  std::optional<int> smooth_n;
  if (auto s = smoothness_order(c, sol.dd)) {
    smooth_n = select_n_smoothness_1d(sol.dd, sol.geometry.L[0], tol, sol.bounds.sup_norm, *s);
    rows.push_back({"N_smoothness", std::to_string(*smooth_n)});
  }
  const int status = plateau_check(sol, job.options, err);
  if (status) return status;
  describe(sol, out, true);
  if (smooth_n) out << "N_smoothness = " << *smooth_n << "\n";
  if (job.options.out) emit(job.options, key_value_csv(rows), out);
  return 0;
}

int run_moment(const JobConfig& job, std::ostream& out, std::ostream& err) {
  const auto& c = job.config;
  const std::size_t d = config_dimension(c);
  if (d != 1) throw ConfigError("moment command is one-dimensional");
  if (c.text_or("payoff.kind", "abs_moment") != "abs_moment")
    throw ConfigError("moment command needs payoff.kind = abs_moment");
  Config cc = c;
  if (!cc.has("payoff.kind")) cc.set("payoff.kind", "abs_moment");
  auto problem = build_problem(cc, d);
  problem.market.reset();
  const auto tol = build_tolerance(c);
  const EngineOptions eo{job.options.threads};
  double total = 0.0;
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto branch : {AbsBranch::positive_part, AbsBranch::negative_part}) {
    const bool pos = branch == AbsBranch::positive_part;
    problem.payoff = AbsMomentPayoff{branch};
    const char* key = pos ? "damping.alpha_positive" : "damping.alpha_negative";
    problem.alpha = c.has(key) ? c.numbers(key, 1) : DampingFactor{0.0};
    const auto sol = solve(problem, tol, overrides_from(c, d), eo);
    if (const int status = plateau_check(sol, job.options, err)) return status;
    total += sol.value;
    const std::string tag = pos ? "positive" : "negative";
    out << "[" << tag << " part]\n";
    describe(sol, out, true);
    rows.push_back({tag + "_value", format_double(sol.value)});
    rows.push_back({tag + "_L", join_exact(sol.geometry.L)});
    rows.push_back({tag + "_N", join(sol.N, ";")});
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", total);
  out << "value = " << buf << "\n";
  rows.insert(rows.begin(), {"value", format_double(total)});
  if (job.options.out) emit(job.options, key_value_csv(rows), out);
  return 0;
}

int run_tune(const JobConfig& job, std::ostream& out, std::ostream& err) {
  const auto& c = job.config;
  const std::size_t d = config_dimension(c);
  const auto problem = build_problem(c, d);
  const auto tol = build_tolerance(c);
  const auto dd = problem_density(problem);
  auto ov = overrides_from(c, d);
  std::vector<double> M = ov.M ? *ov.M : auto_truncation(problem, dd, tol);
  std::vector<double> L = ov.L ? *ov.L : M;
  if (!ov.L)
    for (double& l : L) l *= tol.l_over_m;
  const auto bounds = payoff_bounds(problem.payoff, dd, M);
  const auto sel = select_n_terms(dd, BoxGeometry{M, L}, tol, bounds.l2_norm_sq,
                                  EngineOptions{job.options.threads});
  if (sel.status == SelectionStatus::plateau) {
    err << "cosctl: warning: Parseval gap reached a plateau at " << sel.gap << "\n";
    if (job.options.strict) return 3;
  }
  out << "alpha = " << join(dd.alpha()) << "\n";
  out << "M = " << join(M) << "\n";
  out << "L = " << join(L) << "\n";
  out << "N = " << join(sel.N) << "\n";
  std::vector<std::pair<std::string, std::string>> rows = {
      {"M", join_exact(M)}, {"L", join_exact(L)}, {"N", join(sel.N, ";")}, {"alpha", join_exact(dd.alpha())}};
  if (auto s = smoothness_order(c, dd)) {
    const int n = select_n_smoothness_1d(dd, L[0], tol, bounds.sup_norm, *s);
    out << "N_smoothness = " << n << " (s = " << *s << ")\n";
    rows.push_back({"N_smoothness", std::to_string(n)});
  }
  if (job.options.out) emit(job.options, key_value_csv(rows), out);
  return 0;
}

int run_convergence(const JobConfig& job, std::ostream& out, std::ostream&) {
  const auto& c = job.config;
  const std::size_t d = config_dimension(c);
  ConvergenceStudy study;
  study.beta = c.number_or("convergence.beta", 0.5);
  study.gamma = c.number_or("convergence.gamma", 0.5);
  if (c.has("convergence.n")) {
    for (long n : c.integers("convergence.n")) study.n_grid.push_back(static_cast<int>(n));
  } else {
    study.n_grid = {32, 45, 64, 91, 128, 181, 256, 362, 512};
  }
  const int fit_lo = static_cast<int>(c.number_or("convergence.fit_min", 32));
  const int fit_hi = static_cast<int>(c.number_or("convergence.fit_max", 256));
  std::vector<double> maturities = c.has("convergence.maturity") ? c.numbers("convergence.maturity")
                                                                 : std::vector<double>{c.number("market.maturity")};
  const std::string ref_text = c.text_or("convergence.reference", "oracle");
  std::vector<double> refs;
  if (ref_text != "oracle") {
    refs = c.numbers("convergence.reference", maturities.size());
  }
  const int oracle_n = static_cast<int>(c.number_or("convergence.oracle_n", 0));
  const EngineOptions eo{job.options.threads};
  std::string csv = "maturity,n,value,abs_error,slope_bound,fitted_slope\n";
  for (std::size_t i = 0; i < maturities.size(); ++i) {
    Config cc = c;
    cc.set("market.maturity", format_double(maturities[i]));
    const auto problem = build_problem(cc, d);
    const double reference = refs.empty() ? high_res_cos_oracle(problem, oracle_n, eo) : refs[i];
    const auto points = run_convergence_study(problem, study, reference, eo);
    const auto dd = problem_density(problem);
    const double bound =
        convergence_slope_bound(problem.model->decay(), d, study.beta, !is_undamped(dd.alpha()));
    const double slope = fit_loglog_slope(points, fit_lo, fit_hi);
    for (const auto& p : points) {
      csv += format_double(maturities[i]) + "," + std::to_string(p.n) + "," + format_double(p.value) +
             "," + format_double(p.abs_error) + "," + format_double(bound) + "," +
             format_double(slope) + "\n";
    }
  }
  emit(job.options, csv, out);
  return 0;
}

int run_compare_mc(const JobConfig& job, std::ostream& out, std::ostream&) {
  const auto& c = job.config;
  std::vector<long> dims = c.has("compare.dimension") ? c.integers("compare.dimension")
                                                      : std::vector<long>{static_cast<long>(config_dimension(c))};
  const std::size_t rows = dims.size();
  const auto ns = c.numbers("compare.n", rows);
  const auto ls = c.numbers("compare.l", rows);
  const double eps = c.number_or("compare.epsilon", build_tolerance(c).epsilon);
  const auto paths = static_cast<std::uint64_t>(c.number_or("mc.paths", 1e6));
  const std::uint64_t seed =
      job.options.seed ? *job.options.seed : static_cast<std::uint64_t>(c.number_or("mc.seed", 1));
  const EngineOptions eo{job.options.threads};
  std::string csv = "d,N,L,U,cos_time,mc_time,value,mc_estimate,mc_half_width_99\n";
  for (std::size_t i = 0; i < rows; ++i) {
    const auto d = static_cast<std::size_t>(dims[i]);
    if (d < 1 || d > kMaxDimension) throw ConfigError("compare.dimension out of range");
    const auto problem = build_problem(c, d);
    SolveOverrides ov;
    ov.L = std::vector<double>(d, ls[i]);
    ov.M = ov.L;
    ov.N = std::vector<int>(d, static_cast<int>(ns[i]));
    const auto sol = solve(problem, build_tolerance(c), ov, eo);
    const auto t0 = std::chrono::steady_clock::now();
    const auto mc = mc_estimate(*problem.model, problem.payoff, problem.market, paths, seed, job.options.threads);
    const std::chrono::duration<double> pilot = std::chrono::steady_clock::now() - t0;
    const auto U = required_paths(eps, mc.variance);
    const double mc_time = pilot.count() * static_cast<double>(U) / static_cast<double>(paths);
    csv += std::to_string(d) + "," + std::to_string(static_cast<int>(ns[i])) + "," + format_double(ls[i]) +
           "," + std::to_string(U) + "," + format_double(sol.result.wall_time.count()) + "," +
           format_double(mc_time) + "," + format_double(sol.value) + "," + format_double(mc.estimate) +
           "," + format_double(mc.half_width_99) + "\n";
  }
  emit(job.options, csv, out);
  return 0;
}

}  // namespace

std::size_t config_dimension(const Config& c) {
  if (c.has("model.dimension")) {
    const long d = c.integer("model.dimension");
    if (d < 1 || d > static_cast<long>(kMaxDimension)) throw ConfigError("model.dimension out of range");
    return static_cast<std::size_t>(d);
  }
  for (const char* key : {"market.spot", "model.eta", "model.sigma", "payoff.y", "payoff.strike"}) {
    if (!c.has(key)) continue;
    if (std::string(key) == "payoff.strike" && c.text_or("payoff.kind", "") == "basket_put") continue;
    return c.list_length(key);
  }
  return 1;
}

Problem build_problem(const Config& c, std::size_t d) {
  const std::string family = c.text("model.family");
  const bool market_form = market_parameterization(c);
  std::optional<MarketSpec> market;
  if (market_form) {
    market = MarketSpec{c.numbers("market.spot", d), c.number_or("market.rate", 0.0),
                        c.number("market.maturity")};
  }
  std::shared_ptr<const CharacteristicModel> model;
  if (family == "normal") {
    const auto sigma = covariance(c, d);
    if (market_form)
      model = std::make_shared<NormalModel>(bs_log_return_model(*market, sigma));
    else
      model = std::make_shared<NormalModel>(Eigen::Map<const Eigen::VectorXd>(
                                                c.numbers("model.eta", d).data(), static_cast<Eigen::Index>(d)),
                                            sigma);
  } else if (family == "vg") {
    const auto theta = c.numbers("model.theta", d);
    const auto sigma = c.numbers("model.sigma", d);
    if (market_form)
      model = std::make_shared<VarianceGammaModel>(vg_log_return_model(*market, c.number("model.nu"), theta, sigma));
    else
      model = std::make_shared<VarianceGammaModel>(c.number("model.a"), c.number("model.s"),
                                                   c.numbers("model.eta", d), theta, sigma);
  } else {
    throw ConfigError("model.family must be 'normal' or 'vg'");
  }
  Problem p{model, build_payoff(c, d), {}, std::nullopt};
  validate_payoff(p.payoff, d);
  if (c.has("damping.alpha")) p.alpha = c.numbers("damping.alpha", d);
  const bool priced = std::holds_alternative<DigitalPutPayoff>(p.payoff) ||
                      std::holds_alternative<BasketPutPayoff>(p.payoff) ||
                      std::holds_alternative<VanillaPutPayoff>(p.payoff);
  if (market_form && priced) p.market = market;
  return p;
}

Tolerance build_tolerance(const Config& c) {
  Tolerance t;
  t.epsilon = c.number_or("tolerance.epsilon", t.epsilon);
  t.moment_order = static_cast<int>(c.number_or("tolerance.moment_order", t.moment_order));
  t.n_max = static_cast<int>(c.number_or("tolerance.n_max", t.n_max));
  t.l_over_m = c.number_or("tolerance.l_over_m", t.l_over_m);
  if (!(t.epsilon > 0.0)) throw ConfigError("tolerance.epsilon must be positive");
  if (t.moment_order < 2 || t.moment_order % 2) throw ConfigError("tolerance.moment_order must be even");
  if (t.n_max < 1) throw ConfigError("tolerance.n_max must be positive");
  if (!(t.l_over_m >= 1.0)) throw ConfigError("tolerance.l_over_m must be at least 1");
  return t;
}

int run_job(const JobConfig& job, std::ostream& out, std::ostream& err) {
  try {
    switch (job.command) {
      case Command::price: return run_value(job, out, err, true);
      case Command::cdf: return run_value(job, out, err, false);
      case Command::moment: return run_moment(job, out, err);
      case Command::tune: return run_tune(job, out, err);
      case Command::convergence: return run_convergence(job, out, err);
      case Command::compare_mc: return run_compare_mc(job, out, err);
    }
  } catch (const ConfigError& e) {
    err << "cosctl: config error: " << e.what() << "\n";
    return 1;
  } catch (const InvalidParameters& e) {
    err << "cosctl: invalid parameters: " << e.what() << "\n";
    return 1;
  } catch (const StripViolation& e) {
    err << "cosctl: invalid damping: " << e.what() << "\n";
    return 1;
  } catch (const DampingNotSupported& e) {
    err << "cosctl: invalid damping: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "cosctl: numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace dcos
