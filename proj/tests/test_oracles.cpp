#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dcos/errors.hpp"
#include "dcos/oracles.hpp"
#include "dcos/special.hpp"

using namespace dcos;

namespace {

const double phi01 = 0.539827837277029;

std::shared_ptr<NormalModel> bs_model(std::size_t d, const MarketSpec& mk) {
  return std::make_shared<NormalModel>(bs_log_return_model(mk, 0.04 * Eigen::MatrixXd::Identity(d, d)));
}

}  // namespace

TEST_CASE("Monte Carlo of a constant is exact") {
  NormalModel m(Eigen::VectorXd::Zero(2), 0.04 * Eigen::MatrixXd::Identity(2, 2));
  const auto r = mc_estimate(m, [](std::span<const double>) { return 1.0; }, 1.0, 10000, 3);
  CHECK(r.estimate == 1.0);
  CHECK(r.half_width_99 == 0.0);
  CHECK(r.n_paths == 10000);
}

TEST_CASE("Monte Carlo is reproducible and independent of the worker count") {
  MarketSpec mk{{100.0, 100.0}, 0.0, 1.0};
  auto m = bs_model(2, mk);
  const Payoff p = DigitalPutPayoff{{100.0, 100.0}};
  const auto a = mc_estimate(*m, p, mk, 200000, 42, 1);
  const auto b = mc_estimate(*m, p, mk, 200000, 42, 1);
  const auto c = mc_estimate(*m, p, mk, 200000, 42, 3);
  CHECK(a.estimate == b.estimate);
  CHECK(a.estimate == c.estimate);
  CHECK(a.variance == c.variance);
  const auto other = mc_estimate(*m, p, mk, 200000, 43, 1);
  CHECK(other.estimate != a.estimate);
  CHECK(std::abs(a.estimate - phi01 * phi01) <= a.half_width_99 * 1.5);
}

TEST_CASE("normal sampler reproduces mean and covariance") {
  Eigen::VectorXd eta(2);
  eta << 0.5, -1.0;
  Eigen::MatrixXd S(2, 2);
  S << 0.04, 0.03, 0.03, 0.09;
  NormalModel m(eta, S);
  const std::uint64_t n = 400000;
  const auto mean = mc_estimate(m, [](std::span<const double> x) { return x[0]; }, 1.0, n, 5);
  CHECK(std::abs(mean.estimate - 0.5) <= 5.0 * std::sqrt(mean.variance / n));
  const auto cov = mc_estimate(m, [](std::span<const double> x) { return (x[0] - 0.5) * (x[1] + 1.0); }, 1.0, n, 6);
  CHECK(std::abs(cov.estimate - 0.03) <= 5.0 * std::sqrt(cov.variance / n));
}

TEST_CASE("VG sampler reproduces the first cumulants") {
  const double a = 5.0, s = 0.1, th = -0.03, sig = 0.2;
  VarianceGammaModel m(a, s, {0.2}, {th}, {sig});
  const std::uint64_t n = 400000;
  const double mean = 0.2 + a * s * th;
  const double var = a * s * (sig * sig + th * th * s);
  const auto m1 = mc_estimate(m, [](std::span<const double> x) { return x[0]; }, 1.0, n, 9);
  CHECK(std::abs(m1.estimate - mean) <= 5.0 * std::sqrt(m1.variance / n));
  const auto m2 = mc_estimate(m, [&](std::span<const double> x) { return (x[0] - mean) * (x[0] - mean); }, 1.0, n, 10);
  CHECK(std::abs(m2.estimate - var) <= 5.0 * std::sqrt(m2.variance / n));
  CHECK(m1.variance == doctest::Approx(var).epsilon(0.02));
}

TEST_CASE("required path counts") {
  const double z2 = z99() * z99();
  const auto u1 = required_paths(1e-5, phi01 * (1.0 - phi01));
  CHECK(static_cast<double>(u1) == doctest::Approx(16481995016.0).epsilon(1e-3));
  const double p5 = std::pow(phi01, 5);
  const auto u5 = required_paths(1e-5, p5 * (1.0 - p5));
  CHECK(static_cast<double>(u5) == doctest::Approx(2902219256.0).epsilon(2e-3));
  // halving epsilon quadruples U
  const auto h = required_paths(5e-6, phi01 * (1.0 - phi01));
  CHECK(static_cast<double>(h) == doctest::Approx(4.0 * static_cast<double>(u1)).epsilon(1e-9));
  CHECK(required_paths(1e-2, 1.0) == static_cast<std::uint64_t>(std::ceil(z2 * 1e4)));
  CHECK(required_paths(1e-3, 0.0) == 0);
  CHECK_THROWS_AS(required_paths(0.0, 1.0), InvalidParameters);
}

TEST_CASE("closed-form normal CDF") {
  for (std::size_t d = 1; d <= 4; ++d) {
    NormalModel m(Eigen::VectorXd::Zero(d), 0.04 * Eigen::MatrixXd::Identity(d, d));
    const std::vector<double> y(d, 0.02);
    CHECK(normal_cdf_closed_form(m, y) == doctest::Approx(std::pow(phi01, d)).epsilon(1e-14));
    CHECK(normal_cdf_closed_form(m, std::vector<double>(d, 1e3)) == 1.0);
  }
  Eigen::MatrixXd S(2, 2);
  S << 0.04, 0.01, 0.01, 0.04;
  NormalModel corr(Eigen::VectorXd::Zero(2), S);
  CHECK_THROWS_AS(normal_cdf_closed_form(corr, std::vector<double>{0.0, 0.0}), CorrelatedNotSupported);
}

TEST_CASE("high-resolution COS oracle") {
  SUBCASE("normal CDF") {
    auto m = std::make_shared<NormalModel>(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 0.04));
    const Problem p{m, CdfPayoff{{0.02}}, {0.0}, std::nullopt};
    CHECK(std::abs(high_res_cos_oracle(p) - phi01) <= 1e-9);
  }
  SUBCASE("digital put in two dimensions") {
    MarketSpec mk{{100.0, 100.0}, 0.0, 1.0};
    const Problem p{bs_model(2, mk), DigitalPutPayoff{{100.0, 100.0}}, {-7.0, -7.0}, mk};
    CHECK(std::abs(high_res_cos_oracle(p, 200) - phi01 * phi01) <= 1e-9);
  }
  CHECK(default_oracle_terms(1) == 2000);
  CHECK(default_oracle_terms(3) == 300);
}
