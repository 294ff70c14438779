#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dcos/models.hpp"

namespace testing {

template <class F>
double integrate(F f, double a, double b, double tol = 1e-13) {
  using gk = boost::math::quadrature::gauss_kronrod<double, 61>;
  return gk::integrate(f, a, b, 10, tol);
}

// complex-valued integrand
template <class F>
std::complex<double> integrate_c(F f, double a, double b, double tol = 1e-13) {
  const double re = integrate([&](double x) { return f(x).real(); }, a, b, tol);
  const double im = integrate([&](double x) { return f(x).imag(); }, a, b, tol);
  return {re, im};
}

// Density of theta G + sigma sqrt(G) Z at x, G ~ Gamma(shape a, scale s), via the Bessel K form.
inline double vg_density(double x, double a, double s, double theta, double sigma) {
  const double nu = a - 0.5;
  const double B = 1.0 / s + theta * theta / (2.0 * sigma * sigma);
  const double pre = std::exp(theta * x / (sigma * sigma)) /
                     (std::sqrt(2.0 * std::numbers::pi) * sigma * std::tgamma(a) * std::pow(s, a));
  if (x == 0.0) return pre * std::tgamma(nu) * std::pow(B, -nu);
  const double A = x * x / (2.0 * sigma * sigma);
  return pre * 2.0 * std::pow(A / B, 0.5 * nu) * std::cyl_bessel_k(nu, 2.0 * std::sqrt(A * B));
}

// Hides every optional closed form of the wrapped model.
class BlackBox final : public dcos::CharacteristicModel {
 public:
  explicit BlackBox(std::shared_ptr<const dcos::CharacteristicModel> inner) : inner_(std::move(inner)) {}
  std::size_t dimension() const override { return inner_->dimension(); }
  std::complex<double> evaluate(std::span<const std::complex<double>> z) const override {
    return inner_->evaluate(z);
  }
  bool admits(std::span<const double> alpha) const override { return inner_->admits(alpha); }
  dcos::DecayExponent decay() const override { return inner_->decay(); }

 private:
  std::shared_ptr<const dcos::CharacteristicModel> inner_;
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace testing
