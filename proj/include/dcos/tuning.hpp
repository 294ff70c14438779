#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "dcos/damping.hpp"
#include "dcos/engine.hpp"
#include "dcos/models.hpp"
#include "dcos/payoffs.hpp"

namespace dcos {

struct Tolerance {
  double epsilon = 1e-4;
  int moment_order = 8;
  int n_max = 2000;
  double l_over_m = 1.0;
};

struct ConvergenceStudy {
  double beta = 0.5;
  double gamma = 0.5;
  std::vector<int> n_grid;
};

std::vector<double> truncation_range(const DampedDensity& dd, double sup_norm, const Tolerance& tol);

enum class SelectionStatus { converged, plateau };

struct TermSelection {
  std::vector<int> N;
  SelectionStatus status = SelectionStatus::converged;
  double gap = 0.0;        // |cf_l2_norm - prod L sum' c_k^2| at N
  double threshold = 0.0;  // eps^2 / (162 |v 1|^2)
  double l2_norm = 0.0;
  std::vector<double> partial_sums;  // prod L sum'_{k <= n} c_k^2 for n = 0, 1, ...
};

TermSelection select_n_terms(const DampedDensity& dd, const BoxGeometry& geometry,
                             const Tolerance& tol, double l2_bound_sq,
                             const EngineOptions& options = {}, int increment = 1);

// bound on sup |f^{(s+1)}| through (1/2pi) int |u|^{s+1} |f^(u)| du, returned as a logarithm
double log_derivative_sup_bound(const DampedDensity& dd, int s);
// largest admissible smoothness order s (the density is s+1 times differentiable)
int smoothness_limit(const DampedDensity& dd);
int select_n_smoothness_1d(const DampedDensity& dd, double L, const Tolerance& tol,
                           double sup_norm, int s);

double convergence_slope_bound(DecayExponent p, std::size_t d, double beta, bool damped);
DampingFactor default_alpha(const Payoff& payoff, std::size_t d);

struct Problem {
  std::shared_ptr<const CharacteristicModel> model;
  Payoff payoff;
  DampingFactor alpha;  // empty: default_alpha
  std::optional<MarketSpec> market;
};

struct SolveOverrides {
  std::optional<std::vector<double>> M;
  std::optional<std::vector<double>> L;
  std::optional<std::vector<int>> N;
};

struct Solution {
  DampedDensity dd;
  BoxGeometry geometry;
  std::vector<int> N;
  PayoffBounds bounds;
  std::optional<TermSelection> selection;
  ApproxResult result;
  double value;  // discounted when the problem carries a market
};

DampedDensity problem_density(const Problem& problem);
// M from the truncation formula; iterates when the sup norm depends on M
std::vector<double> auto_truncation(const Problem& problem, const DampedDensity& dd,
                                    const Tolerance& tol);
Solution solve(const Problem& problem, const Tolerance& tol, const SolveOverrides& overrides = {},
               const EngineOptions& options = {});

struct ConvergencePoint {
  int n;
  double value;
  double abs_error;
};

// N = (n,..,n), M = L = gamma n^beta per axis
std::vector<ConvergencePoint> run_convergence_study(const Problem& problem,
                                                    const ConvergenceStudy& study, double reference,
                                                    const EngineOptions& options = {});
// least-squares slope of log(error) against log(n) over n_lo <= n <= n_hi
double fit_loglog_slope(const std::vector<ConvergencePoint>& points, int n_lo, int n_hi);

}  // namespace dcos
