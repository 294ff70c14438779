#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <boost/math/quadrature/gauss.hpp>

#include "dcos/engine.hpp"
#include "dcos/errors.hpp"
#include "dcos/special.hpp"
#include "dcos/tuning.hpp"
#include "helpers.hpp"

using namespace dcos;

namespace {

std::shared_ptr<NormalModel> centered_normal(int d) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Constant(d, d, 0.01);
  for (int i = 0; i < d; ++i) S(i, i) = 0.04 + 0.02 * i;
  return std::make_shared<NormalModel>(Eigen::VectorXd::Zero(d), S);
}

Problem digital_problem(std::size_t d) {
  MarketSpec mk{std::vector<double>(d, 100.0), 0.0, 1.0};
  Eigen::MatrixXd S = 0.04 * Eigen::MatrixXd::Identity(d, d);
  auto m = std::make_shared<NormalModel>(bs_log_return_model(mk, S));
  return Problem{m, DigitalPutPayoff{std::vector<double>(d, 100.0)}, std::vector<double>(d, -7.0), mk};
}

Problem bs_put_problem() {
  MarketSpec mk{{50.0}, 0.0, 1.0};
  auto m = std::make_shared<NormalModel>(bs_log_return_model(mk, Eigen::MatrixXd::Constant(1, 1, 0.04)));
  return Problem{m, VanillaPutPayoff{50.0}, {0.0}, mk};
}

// Black-Scholes put, S = K = 50, sigma = 0.2, T = 1, r = 0
double bs_put_reference() {
  const double d1 = 0.1, d2 = -0.1;
  return 50.0 * normal_cdf(-d2) - 50.0 * normal_cdf(-d1);
}

}  // namespace

TEST_CASE("multi-index helpers") {
  CHECK(zero_count(std::vector<int>{0, 3, 0}) == 2);
  CHECK(primed_weight(std::vector<int>{0, 3, 0}) == 0.25);
  CHECK(primed_weight(std::vector<int>{1, 2}) == 1.0);

  GridShape g({2, 3});
  CHECK(g.size() == 12);
  int k[2];
  g.unravel(1, k);
  CHECK((k[0] == 0 && k[1] == 1));
  g.unravel(11, k);
  CHECK((k[0] == 2 && k[1] == 3));
}

TEST_CASE("shells partition the grid without duplicates") {
  for (std::size_t d = 1; d <= 3; ++d) {
    const int n_max = 5;
    std::set<std::vector<int>> seen;
    for (int n = 0; n <= n_max; ++n) {
      const auto sz = shell_size(d, n);
      for (std::size_t i = 0; i < sz; ++i) {
        std::vector<int> k(d);
        shell_index(d, n, i, k.data());
        CHECK(*std::max_element(k.begin(), k.end()) == n);
        CHECK(seen.insert(k).second);
      }
    }
    CHECK(seen.size() == static_cast<std::size_t>(std::pow(n_max + 1, d)));
  }
}

TEST_CASE("basis functions") {
  const std::vector<double> L{1.5, 0.7};
  CHECK(basis_eval(std::vector<int>{0, 0}, L, std::vector<double>{0.3, -0.2}) == 1.0);
  CHECK(basis_eval(std::vector<int>{3, 5}, L, std::vector<double>{-1.5, -0.7}) == doctest::Approx(1.0));
  // orthogonality: int e_k e_j over [-L, L] = prod L 2^{-Lambda(k)} delta_kj
  using gauss = boost::math::quadrature::gauss<double, 30>;
  for (auto [k, j] : {std::pair{0, 0}, std::pair{3, 3}, std::pair{2, 5}, std::pair{4, 0}}) {
    const double v = gauss::integrate(
        [&](double x) {
          return basis_eval(std::vector<int>{k}, std::vector<double>{1.5}, std::vector<double>{x}) *
                 basis_eval(std::vector<int>{j}, std::vector<double>{1.5}, std::vector<double>{x});
        },
        -1.5, 1.5);
    const double expect = k == j ? 1.5 * (k == 0 ? 2.0 : 1.0) : 0.0;
    CHECK(std::abs(v - expect) <= 1e-12);
  }
}

TEST_CASE("coefficients: examples") {
  auto m = std::make_shared<NormalModel>(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 0.04));
  DampedDensity dd = build_damped_density(m, {});
  const std::vector<double> L{1.0};
  CHECK(coefficient(dd, L, std::vector<int>{0}) == doctest::Approx(1.0));
  const double pi = std::numbers::pi;
  CHECK(coefficient(dd, L, std::vector<int>{2}) == doctest::Approx(-std::exp(-0.5 * 0.04 * pi * pi)).epsilon(1e-14));
  CHECK(std::abs(coefficient(dd, L, std::vector<int>{3})) <= 1e-16);
}

TEST_CASE("coefficients equal quadrature of the density against the basis") {
  using gauss = boost::math::quadrature::gauss<double, 30>;
  auto m = centered_normal(2);
  DampedDensity dd = build_damped_density(m, {});
  const Eigen::MatrixXd Sinv = m->sigma().inverse();
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(m->sigma().determinant()));
  auto dens = [&](double x, double y) {
    Eigen::Vector2d v(x, y);
    return norm * std::exp(-0.5 * v.dot(Sinv * v));
  };
  const std::vector<double> L{0.9, 1.1};
  // integrate over a 10-sigma box split into panels; the mass outside is below 1e-20
  auto panels = [](double a, double b, int n, auto f) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += gauss::integrate(f, a + (b - a) * i / n, a + (b - a) * (i + 1) / n);
    return acc;
  };
  for (auto [k1, k2] : {std::pair{0, 0}, std::pair{1, 2}, std::pair{3, 1}, std::pair{4, 4}}) {
    const std::vector<int> k{k1, k2};
    const double ref = panels(-2.0, 2.0, 16, [&](double x) {
      return panels(-2.5, 2.5, 16, [&](double y) {
        return dens(x, y) * basis_eval(k, L, std::vector<double>{x, y});
      });
    }) / (L[0] * L[1]);
    CHECK(std::abs(coefficient(dd, L, k) - ref) <= 1e-10);
  }
}

TEST_CASE("coefficient tensor") {
  auto m = std::make_shared<NormalModel>(Eigen::VectorXd::Zero(2), 0.04 * Eigen::MatrixXd::Identity(2, 2));
  DampedDensity dd = build_damped_density(m, {});
  const std::vector<double> L{1.0, 1.0};
  SUBCASE("N = 0 has a single entry") {
    const auto t = coefficient_tensor(dd, L, std::vector<int>{0, 0});
    REQUIRE(t.size() == 1);
    CHECK(t[0] == doctest::Approx(1.0));
  }
  SUBCASE("symmetric under an axis swap, odd sums vanish exactly") {
    const int N = 6;
    const auto t = coefficient_tensor(dd, L, std::vector<int>{N, N});
    for (int i = 0; i <= N; ++i) {
      for (int j = 0; j <= N; ++j) {
        CHECK(t[i * (N + 1) + j] == doctest::Approx(t[j * (N + 1) + i]).epsilon(1e-14));
        if ((i + j) % 2 == 1) CHECK(t[i * (N + 1) + j] == 0.0);
        CHECK(t[i * (N + 1) + j] == doctest::Approx(coefficient(dd, L, std::vector<int>{i, j})).epsilon(1e-13));
      }
    }
  }
  SUBCASE("allocation cap") {
    EngineOptions small{1, 100};
    CHECK_THROWS_AS(coefficient_tensor(dd, L, std::vector<int>{20, 20}, small), AllocationTooLarge);
  }
}

TEST_CASE("primed weights sum to prod (N + 1/2)") {
  CosPlan plan{{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {3, 5, 2}, {}, false};
  plan.coefficients.assign(4 * 6 * 3, 1.0);
  const auto r = approximate_integral(plan, [](std::span<const int>) { return 1.0; });
  CHECK(r.value == doctest::Approx(3.5 * 5.5 * 2.5).epsilon(1e-14));
}

TEST_CASE("the constant payoff integrates to one") {
  auto m = centered_normal(2);
  DampedDensity dd = build_damped_density(m, {});
  const auto plan = make_plan(dd, {1.0, 1.2}, {1.0, 1.2}, {8, 8});
  // v_0 = prod(2 M), every other v_k vanishes on a box with M = L
  const auto r = approximate_integral(plan, [](std::span<const int> k) {
    return (k[0] == 0 && k[1] == 0) ? 2.0 * 2.4 : 0.0;
  });
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(make_plan(dd, {1.0, 1.0}, {0.5, 1.0}, {8, 8}), InvalidParameters);
}

TEST_CASE("three-dimensional digital put") {
  const auto p = digital_problem(3);
  SolveOverrides ov{std::vector<double>(3, 3.0), std::vector<double>(3, 3.0), std::vector<int>(3, 40)};
  const auto sol = solve(p, Tolerance{1e-5}, ov);
  CHECK(std::abs(sol.value - std::pow(normal_cdf(0.1), 3)) <= 1e-5);
}

TEST_CASE("results are deterministic and independent of the thread count") {
  const auto p = digital_problem(2);
  SolveOverrides ov{std::vector<double>(2, 2.4), std::vector<double>(2, 2.4), std::vector<int>(2, 30)};
  const auto a = solve(p, Tolerance{1e-5}, ov, EngineOptions{1});
  const auto b = solve(p, Tolerance{1e-5}, ov, EngineOptions{1});
  const auto c = solve(p, Tolerance{1e-5}, ov, EngineOptions{4});
  CHECK(a.value == b.value);
  CHECK(a.value == c.value);
  CHECK(std::abs(a.value - std::pow(normal_cdf(0.1), 2)) <= 1e-5);
}

TEST_CASE("error decreases with the number of terms") {
  const auto p = bs_put_problem();
  double prev = INFINITY;
  for (int n : {4, 8, 16}) {
    SolveOverrides ov{std::nullopt, std::nullopt, std::vector<int>{n}};
    const auto sol = solve(p, Tolerance{1e-2}, ov);
    const double err = std::abs(sol.value - bs_put_reference());
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("price_option discounts") {
  ApproxResult r;
  r.value = 10.0;
  CHECK(price_option(MarketSpec{{1.0}, 0.05, 1.0}, r) == doctest::Approx(10.0 * std::exp(-0.05)));
}
