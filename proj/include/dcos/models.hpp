#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dcos {

inline constexpr std::size_t kMaxDimension = 8;

class DampedDensity;

struct DecayExponent {
  bool exponential = false;
  double p = 0.0;

  static DecayExponent exponential_decay() { return {true, 0.0}; }
  static DecayExponent polynomial(double p) { return {false, p}; }
};

struct DampingConstants {
  double lambda;
  std::vector<double> mu;
};

struct MarketSpec {
  std::vector<double> spot;
  double rate = 0.0;
  double maturity = 1.0;
};

// Characteristic function g^(z) = E[exp(i z.X)] extended to a complex strip.
class CharacteristicModel {
 public:
  virtual ~CharacteristicModel() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::complex<double> evaluate(std::span<const std::complex<double>> z) const = 0;
  // true when g^(-i alpha) exists
  virtual bool admits(std::span<const double> alpha) const = 0;
  virtual DecayExponent decay() const = 0;

  // Optional closed forms; an empty optional routes callers to numerical fallbacks.
  virtual std::optional<DampingConstants> damping_constants(std::span<const double>) const {
    return std::nullopt;
  }
  // n-th central moment along axis h of the damped, centered density
  virtual std::optional<double> damped_moment(std::span<const double>, std::size_t, int) const {
    return std::nullopt;
  }
  // declares that the damped, centered characteristic function is real-valued
  virtual bool damped_cf_is_real(std::span<const double>) const { return false; }
  // (2 pi)^{-d} int |f^|^2 in closed form
  virtual std::optional<double> damped_cf_l2_closed_form(std::span<const double>) const {
    return std::nullopt;
  }
  // density at zero of the law with characteristic function f^(u)^2; valid when f^ is real
  virtual std::optional<double> doubled_density_at_zero(std::span<const double>) const {
    return std::nullopt;
  }
};

class NormalModel final : public CharacteristicModel {
 public:
  NormalModel(Eigen::VectorXd eta, Eigen::MatrixXd sigma);

  std::size_t dimension() const override { return static_cast<std::size_t>(eta_.size()); }
  std::complex<double> evaluate(std::span<const std::complex<double>> z) const override;
  bool admits(std::span<const double> alpha) const override;
  DecayExponent decay() const override { return DecayExponent::exponential_decay(); }

  std::optional<DampingConstants> damping_constants(std::span<const double> alpha) const override;
  std::optional<double> damped_moment(std::span<const double> alpha, std::size_t h,
                                      int n) const override;
  bool damped_cf_is_real(std::span<const double>) const override { return true; }
  std::optional<double> damped_cf_l2_closed_form(std::span<const double>) const override;

  const Eigen::VectorXd& eta() const { return eta_; }
  const Eigen::MatrixXd& sigma() const { return sigma_; }
  const Eigen::MatrixXd& cholesky() const { return chol_; }

 private:
  Eigen::VectorXd eta_;
  Eigen::MatrixXd sigma_;
  Eigen::MatrixXd chol_;
  double det_;
};

// VG(a, s, eta, theta, sigma): X = eta + theta G + sqrt(G) diag(sigma) Z, G ~ Gamma(a, scale s).
class VarianceGammaModel final : public CharacteristicModel {
 public:
  VarianceGammaModel(double a, double s, std::vector<double> eta, std::vector<double> theta,
                     std::vector<double> sigma);

  std::size_t dimension() const override { return eta_.size(); }
  std::complex<double> evaluate(std::span<const std::complex<double>> z) const override;
  bool admits(std::span<const double> alpha) const override;
  DecayExponent decay() const override { return DecayExponent::polynomial(2.0 * a_); }

  std::optional<DampingConstants> damping_constants(std::span<const double> alpha) const override;
  std::optional<double> damped_moment(std::span<const double> alpha, std::size_t h,
                                      int n) const override;
  bool damped_cf_is_real(std::span<const double> alpha) const override;
  std::optional<double> doubled_density_at_zero(std::span<const double> alpha) const override;

  double zeta(std::span<const double> alpha) const;
  // cumulants kappa_1..kappa_n of axis h of the damped, centered density (kappa_1 = 0)
  std::vector<double> damped_cumulants(std::span<const double> alpha, std::size_t h,
                                       int n) const;

  double a() const { return a_; }
  double s() const { return s_; }
  const std::vector<double>& eta() const { return eta_; }
  const std::vector<double>& theta() const { return theta_; }
  const std::vector<double>& sigma() const { return sigma_; }

 private:
  double a_;
  double s_;
  std::vector<double> eta_;
  std::vector<double> theta_;
  std::vector<double> sigma_;
};

NormalModel bs_log_return_model(const MarketSpec& market, const Eigen::MatrixXd& sigma);
VarianceGammaModel vg_log_return_model(const MarketSpec& market, double nu,
                                       const std::vector<double>& theta,
                                       const std::vector<double>& sigma);

// central moments from cumulants, m_0..m_n
std::vector<double> moments_from_cumulants(const std::vector<double>& kappa);

double axis_moment(const DampedDensity& dd, std::size_t h, int n);
double cf_l2_norm(const DampedDensity& dd);
// tensor Gauss-Legendre estimate of (2 pi)^{-d} int |f^|^2, bypassing closed forms
double cf_l2_norm_quadrature(const DampedDensity& dd);

}  // namespace dcos
