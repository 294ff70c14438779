#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dcos/errors.hpp"
#include "dcos/tuning.hpp"
#include "helpers.hpp"

using namespace dcos;

namespace {

Problem vg_cdf() {
  auto m = std::make_shared<VarianceGammaModel>(1.0 / 0.19, 0.19, std::vector<double>{0.0},
                                                std::vector<double>{0.0}, std::vector<double>{0.13});
  return Problem{m, CdfPayoff{{0.1}}, {0.0}, std::nullopt};
}

Problem vg_put() {
  MarketSpec mk{{50.0}, 0.0, 1.0};
  auto m = std::make_shared<VarianceGammaModel>(vg_log_return_model(mk, 0.1686, {-0.1436}, {0.1213}));
  return Problem{m, VanillaPutPayoff{50.0}, {0.0}, mk};
}

Problem bs_put() {
  MarketSpec mk{{50.0}, 0.0, 1.0};
  auto m = std::make_shared<NormalModel>(bs_log_return_model(mk, Eigen::MatrixXd::Constant(1, 1, 0.04)));
  return Problem{m, VanillaPutPayoff{50.0}, {0.0}, mk};
}

Problem bs_basket() {
  MarketSpec mk{{50.0, 50.0}, 0.0, 1.0};
  Eigen::MatrixXd S(2, 2);
  S << 0.04, 0.04, 0.04, 0.16;
  auto m = std::make_shared<NormalModel>(bs_log_return_model(mk, S));
  return Problem{m, BasketPutPayoff{100.0}, {-4.0, -4.0}, mk};
}

struct Selected {
  TermSelection sel;
  BoxGeometry geometry;
  PayoffBounds bounds;
};

Selected select(const Problem& p, const Tolerance& tol, int increment = 1) {
  const auto dd = problem_density(p);
  const auto M = auto_truncation(p, dd, tol);
  BoxGeometry g{M, M};
  const auto b = payoff_bounds(p.payoff, dd, M);
  return {select_n_terms(dd, g, tol, b.l2_norm_sq, {}, increment), g, b};
}

}  // namespace

TEST_CASE("truncation range") {
  const auto p = vg_cdf();
  const auto dd = problem_density(p);
  const Tolerance tol{1e-4};
  const auto M = truncation_range(dd, 1.0, tol);
  // the reference reports M = L = 0.9 to one decimal
  CHECK(std::round(M[0] * 10.0) / 10.0 == doctest::Approx(0.9));
  // M^n scales linearly with the sup norm
  const auto M2 = truncation_range(dd, 2.0, tol);
  CHECK(M2[0] / M[0] == doctest::Approx(std::pow(2.0, 1.0 / 8.0)).epsilon(1e-14));
  // tighter tolerances widen the range
  double prev = 0.0;
  for (double eps : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const double m = truncation_range(dd, 1.0, Tolerance{eps})[0];
    CHECK(m > prev);
    prev = m;
  }
  CHECK_THROWS_AS(truncation_range(dd, 1.0, Tolerance{1e-4, 3}), InvalidParameters);
}

TEST_CASE("digital truncation range is about 2 in one dimension") {
  MarketSpec mk{{100.0}, 0.0, 1.0};
  auto m = std::make_shared<NormalModel>(bs_log_return_model(mk, Eigen::MatrixXd::Constant(1, 1, 0.04)));
  const Problem p{m, DigitalPutPayoff{{100.0}}, {-7.0}, mk};
  const auto dd = problem_density(p);
  const auto M = auto_truncation(p, dd, Tolerance{1e-5});
  CHECK(std::round(M[0] * 10.0) / 10.0 == doctest::Approx(2.0));
}

TEST_CASE("Parseval selection reproduces the reference term counts") {
  const auto cdf = select(vg_cdf(), Tolerance{1e-4});
  CHECK(cdf.sel.N[0] == 46);
  const auto put = select(vg_put(), Tolerance{1e-3});
  CHECK(put.sel.N[0] >= 20);
  CHECK(put.sel.N[0] <= 80);
  const auto bs = select(bs_put(), Tolerance{1e-2});
  CHECK(bs.sel.N[0] >= 10);
  CHECK(bs.sel.N[0] <= 20);
  const auto basket = select(bs_basket(), Tolerance{1e-2});
  CHECK(basket.sel.N == std::vector<int>{72, 72});
}

TEST_CASE("Parseval partial sums increase towards the L2 norm") {
  for (const auto& p : {vg_cdf(), bs_basket()}) {
    const auto s = select(p, Tolerance{1e-4});
    for (std::size_t i = 1; i < s.sel.partial_sums.size(); ++i)
      CHECK(s.sel.partial_sums[i] >= s.sel.partial_sums[i - 1]);
    CHECK(s.sel.partial_sums.back() <= s.sel.l2_norm * (1.0 + 1e-3));
  }
}

TEST_CASE("selection is monotone in epsilon and independent of the increment") {
  int prev = 0;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const int n = select(vg_cdf(), Tolerance{eps}).sel.N[0];
    CHECK(n >= prev);
    prev = n;
  }
  const int n1 = select(vg_cdf(), Tolerance{1e-4}, 1).sel.N[0];
  const int n5 = select(vg_cdf(), Tolerance{1e-4}, 5).sel.N[0];
  CHECK(n5 >= n1);
  CHECK(n5 < n1 + 5);
}

TEST_CASE("selection stops at a plateau or at n_max") {
  const auto p = bs_put();
  const auto dd = problem_density(p);
  BoxGeometry g{{1.2}, {1.2}};
  const auto b = payoff_bounds(p.payoff, dd, g.M);
  const auto sel = select_n_terms(dd, g, Tolerance{1e-14}, b.l2_norm_sq);
  CHECK(sel.status == SelectionStatus::plateau);
  CHECK(sel.gap > sel.threshold);
  CHECK_THROWS_AS(select_n_terms(dd, g, Tolerance{1e-4, 8, 5}, b.l2_norm_sq), NotConverged);
}

TEST_CASE("smoothness-based term counts") {
  const Tolerance tol{1e-4};
  SUBCASE("VG CDF at the maximal order") {
    const auto p = vg_cdf();
    const auto dd = problem_density(p);
    const int J = smoothness_limit(dd);
    CHECK(J == 8);
    const auto M = auto_truncation(p, dd, tol);
    const int n = select_n_smoothness_1d(dd, M[0], tol, 1.0, J);
    CHECK(n >= 104);
    CHECK(n <= 110);
    CHECK_THROWS_AS(select_n_smoothness_1d(dd, M[0], tol, 1.0, J + 1), SmoothnessExceeded);
  }
  SUBCASE("VG put") {
    const auto p = vg_put();
    const auto dd = problem_density(p);
    CHECK(smoothness_limit(dd) == 9);
    const Tolerance t3{1e-3};
    const auto M = auto_truncation(p, dd, t3);
    const auto b = payoff_bounds(p.payoff, dd, M);
    const int n = select_n_smoothness_1d(dd, M[0], t3, b.sup_norm, 9);
    CHECK(n >= 140);
    CHECK(n <= 165);
  }
  SUBCASE("Black-Scholes put with s = 40") {
    const auto p = bs_put();
    const auto dd = problem_density(p);
    const Tolerance t2{1e-2};
    const auto M = auto_truncation(p, dd, t2);
    const auto b = payoff_bounds(p.payoff, dd, M);
    const int n = select_n_smoothness_1d(dd, M[0], t2, b.sup_norm, 40);
    CHECK(n >= 16);
    CHECK(n <= 24);
  }
}

TEST_CASE("numerical derivative bound agrees with the Gaussian closed form") {
  auto m = std::make_shared<NormalModel>(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 0.04));
  auto bb = std::make_shared<testing::BlackBox>(m);
  const auto exact = build_damped_density(m, {});
  const auto numeric = build_damped_density(bb, {});
  for (int s : {1, 4, 10, 30}) {
    const double a = log_derivative_sup_bound(exact, s);
    const double b = log_derivative_sup_bound(numeric, s);
    CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("convergence slope bounds") {
  CHECK(convergence_slope_bound(DecayExponent::polynomial(20.0), 2, 0.5, true) == doctest::Approx(-9.5));
  CHECK(convergence_slope_bound(DecayExponent::polynomial(20.0), 2, 0.5, false) == doctest::Approx(-9.0));
  CHECK(convergence_slope_bound(DecayExponent::polynomial(10.0), 2, 0.5, true) == doctest::Approx(-4.5));
  CHECK(std::isinf(convergence_slope_bound(DecayExponent::exponential_decay(), 3, 0.5, true)));
  CHECK_THROWS_AS(convergence_slope_bound(DecayExponent::polynomial(0.9), 2, 0.5, true), DecayTooSlow);
  CHECK_THROWS_AS(convergence_slope_bound(DecayExponent::polynomial(20.0), 2, 1.0, true), InvalidParameters);
}

TEST_CASE("log-log slope fit recovers an exact power law") {
  std::vector<ConvergencePoint> pts;
  for (int n : {10, 20, 40, 80, 160}) pts.push_back({n, 0.0, 3.0 * std::pow(n, -4.25)});
  CHECK(fit_loglog_slope(pts, 10, 160) == doctest::Approx(-4.25).epsilon(1e-12));
  CHECK(fit_loglog_slope(pts, 20, 80) == doctest::Approx(-4.25).epsilon(1e-12));
}

TEST_CASE("default damping factors") {
  CHECK(default_alpha(BasketPutPayoff{100.0}, 2) == DampingFactor{-4.0, -4.0});
  CHECK(default_alpha(DigitalPutPayoff{{1.0}}, 1) == DampingFactor{-7.0});
  CHECK(default_alpha(CdfPayoff{{0.1}}, 1) == DampingFactor{0.0});
}

TEST_CASE("solve prices the Black-Scholes put") {
  const auto sol = solve(bs_put(), Tolerance{1e-2});
  // S = K = 50, sigma = 0.2, T = 1, r = 0: 50 (2 Phi(0.1) - 1)
  const double ref = 50.0 * (2.0 * 0.539827837277029 - 1.0);
  CHECK(std::abs(sol.value - ref) <= 1e-2);
  CHECK(sol.selection.has_value());
}
