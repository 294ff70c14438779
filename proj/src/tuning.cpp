#include "dcos/tuning.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dcos/errors.hpp"
#include "dcos/parallel.hpp"

namespace dcos {

std::vector<double> truncation_range(const DampedDensity& dd, double sup_norm, const Tolerance& tol) {
  if (!(tol.epsilon > 0.0)) throw InvalidParameters("epsilon must be positive");
  if (tol.moment_order < 2 || tol.moment_order % 2 != 0)
    throw InvalidParameters("moment order must be even and at least 2");
  if (!(sup_norm > 0.0) || !std::isfinite(sup_norm))
    throw InvalidParameters("sup norm of the damped payoff must be positive and finite");
  const std::size_t d = dd.dimension();
  const int n = tol.moment_order;
  std::vector<double> M(d);
  for (std::size_t h = 0; h < d; ++h) {
    const double m = axis_moment(dd, h, n);
    M[h] = std::exp((std::log(3.0 * static_cast<double>(d) * sup_norm) + std::log(m) -
                     std::log(tol.epsilon)) /
                    n);
  }
  return M;
}

TermSelection select_n_terms(const DampedDensity& dd, const BoxGeometry& geometry,
                             const Tolerance& tol, double l2_bound_sq, const EngineOptions& options,
                             int increment) {
  if (increment < 1) throw InvalidParameters("shell increment must be positive");
  if (!(l2_bound_sq > 0.0)) throw InvalidParameters("payoff L2 bound must be positive");
  const std::size_t d = dd.dimension();
  const auto& L = geometry.L;
  double prod_l = 1.0;
  for (double l : L) prod_l *= l;

  TermSelection sel;
  sel.l2_norm = cf_l2_norm(dd);
  sel.threshold = tol.epsilon * tol.epsilon / (162.0 * l2_bound_sq);
  const bool skip_odd = dd.real_cf();

  CompensatedSum partial;
  auto add_shell = [&](int n) {
    const auto s = ordered_sum(shell_size(d, n), options.threads, [&](std::size_t i) {
      std::array<int, kMaxDimension> k;
      shell_index(d, n, i, k.data());
      const std::span<const int> ks(k.data(), d);
      int sum = 0;
      for (int kh : ks) sum += kh;
      if (skip_odd && sum % 2 != 0) return 0.0;
      const double c = coefficient(dd, L, ks);
      return primed_weight(ks) * c * c;
    });
    partial.add(s.value() * prod_l);
    sel.partial_sums.push_back(partial.value());
  };

  add_shell(0);
  double best_gap = std::abs(sel.l2_norm - partial.value());
  int best_n = 0;
  int stale = 0;
  int n = 0;
  while (n < tol.n_max) {
    const int next = std::min(n + increment, tol.n_max);
    for (int m = n + 1; m <= next; ++m) add_shell(m);
    n = next;
    const double gap = std::abs(sel.l2_norm - partial.value());
    if (gap <= sel.threshold) {
      sel.N.assign(d, n);
      sel.gap = gap;
      sel.status = SelectionStatus::converged;
      return sel;
    }
    if (gap > 0.999 * best_gap)
      ++stale;
    else
      stale = 0;
    if (gap < best_gap) {
      best_gap = gap;
      best_n = n;
    }
    if (stale >= 3) {
      sel.N.assign(d, best_n);
      sel.gap = best_gap;
      sel.status = SelectionStatus::plateau;
      return sel;
    }
  }
  throw NotConverged("Parseval criterion not met within n_max = " + std::to_string(tol.n_max) +
                     " terms (gap " + std::to_string(best_gap) + ")");
}

double log_derivative_sup_bound(const DampedDensity& dd, int s) {
  if (dd.dimension() != 1) throw InvalidParameters("smoothness bound is one-dimensional");
  if (s < 1) throw InvalidParameters("smoothness order must be at least 1");
  const double q = s + 2.0;
  if (const auto* normal = dynamic_cast<const NormalModel*>(&dd.model())) {
    const double var = normal->sigma()(0, 0);
    return -std::log(std::numbers::pi) + std::lgamma(0.5 * q) - std::log(2.0) -
           0.5 * q * std::log(0.5 * var);
  }
  const auto decay = dd.model().decay();
  if (!decay.exponential && !(decay.p > q))
    throw SmoothnessExceeded("derivative bound integral diverges for this smoothness order");
  std::array<double, 1> u{};
  auto abs_cf = [&](double x) {
    u[0] = x;
    return std::abs(dd(u));
  };
  // |u|^{s+1}|f^(u)| integrated over u > 0 and doubled; scaled by exp(-shift) against overflow
  const double scale = std::sqrt(axis_moment(dd, 0, 2));
  double U = 10.0 / scale;
  const double shift = (s + 1.0) * std::log(U);
  auto integrand = [&](double x) {
    if (x <= 0.0) return 0.0;
    return std::exp((s + 1.0) * std::log(x) - shift) * abs_cf(x);
  };
  using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  double total = gk::integrate(integrand, 0.0, U, 15, 1e-12);
  double tail = 0.0;
  for (int it = 0; it < 200; ++it) {
    total += gk::integrate(integrand, U, 2.0 * U, 15, 1e-12);
    U *= 2.0;
    if (decay.exponential) {
      tail = integrand(U) * U;
      if (tail < 1e-3 * total) break;
      continue;
    }
    // |f^(u)| ~ C u^{-p}: tail = int_U^inf C u^{s+1-p} du
    const double log_c = std::log(abs_cf(U)) + decay.p * std::log(U);
    tail = std::exp(log_c + (q - decay.p) * std::log(U) - shift) / (decay.p - q);
    if (tail < 1e-3 * total) break;
  }
  total += tail;
  return std::log(total) + shift - std::log(std::numbers::pi);
}

int smoothness_limit(const DampedDensity& dd) {
  const auto decay = dd.model().decay();
  if (decay.exponential) return INT_MAX;
  const double bound = decay.p - 2.0;
  if (!(bound > 1.0)) return 0;
  return static_cast<int>(std::ceil(bound)) - 1;
}

int select_n_smoothness_1d(const DampedDensity& dd, double L, const Tolerance& tol,
                           double sup_norm, int s) {
  if (dd.dimension() != 1) throw InvalidParameters("smoothness bound is one-dimensional");
  if (s < 1) throw InvalidParameters("smoothness order must be at least 1");
  const int J = smoothness_limit(dd);
  if (s > J)
    throw SmoothnessExceeded("smoothness order " + std::to_string(s) + " exceeds the admissible " +
                             std::to_string(J));
  const double pi = std::numbers::pi;
  const double log_n = ((s + 2.5) * std::log(2.0) + log_derivative_sup_bound(dd, s) +
                        (s + 2.0) * std::log(L) - std::log(static_cast<double>(s)) -
                        (s + 1.0) * std::log(pi) + std::log(12.0 * sup_norm / tol.epsilon)) /
                       s;
  return static_cast<int>(std::ceil(std::exp(log_n)));
}

double convergence_slope_bound(DecayExponent p, std::size_t d, double beta, bool damped) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidParameters("beta must lie in (0, 1)");
  const double hd = 0.5 * static_cast<double>(d);
  if (p.exponential) return -INFINITY;
  if (!(p.p > hd)) throw DecayTooSlow("decay exponent must exceed d/2");
  return damped ? -(1.0 - beta) * (p.p - hd) : -(1.0 - beta) * p.p + hd;
}

DampingFactor default_alpha(const Payoff& payoff, std::size_t d) {
  if (std::holds_alternative<BasketPutPayoff>(payoff)) return DampingFactor(d, -4.0);
  if (std::holds_alternative<DigitalPutPayoff>(payoff)) return DampingFactor(d, -7.0);
  return DampingFactor(d, 0.0);
}

DampedDensity problem_density(const Problem& problem) {
  if (!problem.model) throw InvalidParameters("problem has no model");
  const std::size_t d = problem.model->dimension();
  validate_payoff(problem.payoff, d);
  auto alpha = problem.alpha.empty() ? default_alpha(problem.payoff, d) : problem.alpha;
  return build_damped_density(problem.model, std::move(alpha));
}

std::vector<double> auto_truncation(const Problem& problem, const DampedDensity& dd,
                                    const Tolerance& tol) {
  std::vector<double> M(dd.dimension(), 1.0);
  for (int it = 0; it < 100; ++it) {
    const double sup = payoff_bounds(problem.payoff, dd, M).sup_norm;
    auto next = truncation_range(dd, sup, tol);
    double change = 0.0;
    for (std::size_t h = 0; h < M.size(); ++h) change = std::max(change, std::abs(next[h] / M[h] - 1.0));
    M = std::move(next);
    if (change < 1e-13) break;
  }
  return M;
}

Solution solve(const Problem& problem, const Tolerance& tol, const SolveOverrides& overrides,
               const EngineOptions& options) {
  auto dd = problem_density(problem);
  const std::size_t d = dd.dimension();
  std::vector<double> M, L;
  if (overrides.M) {
    M = *overrides.M;
  } else if (overrides.L) {
    M = *overrides.L;
    for (double& m : M) m /= tol.l_over_m;
  } else {
    M = auto_truncation(problem, dd, tol);
  }
  if (overrides.L) {
    L = *overrides.L;
  } else {
    L = M;
    for (double& l : L) l *= tol.l_over_m;
  }
  if (M.size() != d || L.size() != d) throw InvalidParameters("truncation range has wrong length");
  BoxGeometry geometry{M, L};
  const auto bounds = payoff_bounds(problem.payoff, dd, M);
  std::optional<TermSelection> selection;
  std::vector<int> N;
  if (overrides.N) {
    N = *overrides.N;
    if (N.size() != d) throw InvalidParameters("number of terms has wrong length");
  } else {
    selection = select_n_terms(dd, geometry, tol, bounds.l2_norm_sq, options);
    N = selection->N;
  }
  const auto provider = make_coefficient_provider(problem.payoff, dd, geometry);
  const auto start = std::chrono::steady_clock::now();
  const auto plan = make_plan(dd, M, L, N, options);
  auto result = approximate_integral(plan, provider, options);
  result.wall_time = std::chrono::steady_clock::now() - start;
  if (selection) {
    result.diagnostics["parseval_gap"] = selection->gap;
    result.diagnostics["parseval_threshold"] = selection->threshold;
    result.diagnostics["cf_l2_norm"] = selection->l2_norm;
  }
  result.diagnostics["sup_norm"] = bounds.sup_norm;
  result.diagnostics["l2_norm_sq"] = bounds.l2_norm_sq;
  const double value = problem.market ? price_option(*problem.market, result) : result.value;
  return Solution{std::move(dd), std::move(geometry), std::move(N), bounds, std::move(selection),
                  std::move(result), value};
}

std::vector<ConvergencePoint> run_convergence_study(const Problem& problem,
                                                    const ConvergenceStudy& study, double reference,
                                                    const EngineOptions& options) {
  if (!(study.beta > 0.0 && study.beta < 1.0)) throw InvalidParameters("beta must lie in (0, 1)");
  if (!(study.gamma > 0.0)) throw InvalidParameters("gamma must be positive");
  const std::size_t d = problem.model->dimension();
  std::vector<ConvergencePoint> out;
  for (int n : study.n_grid) {
    SolveOverrides ov;
    const double range = study.gamma * std::pow(static_cast<double>(n), study.beta);
    ov.M = std::vector<double>(d, range);
    ov.L = ov.M;
    ov.N = std::vector<int>(d, n);
    const auto sol = solve(problem, Tolerance{}, ov, options);
    out.push_back({n, sol.value, std::abs(sol.value - reference)});
  }
  return out;
}

double fit_loglog_slope(const std::vector<ConvergencePoint>& points, int n_lo, int n_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& p : points) {
    if (p.n < n_lo || p.n > n_hi || !(p.abs_error > 0.0)) continue;
    const double x = std::log(static_cast<double>(p.n));
    const double y = std::log(p.abs_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw InvalidParameters("slope fit needs at least two points with positive error");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace dcos
