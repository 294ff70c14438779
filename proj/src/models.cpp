#include "dcos/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "dcos/damping.hpp"
#include "dcos/errors.hpp"

namespace dcos {

using cplx = std::complex<double>;

namespace {

double double_factorial(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

void require_positive(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x)) throw InvalidParameters(std::string(what) + " must be positive");
}

}  // namespace

NormalModel::NormalModel(Eigen::VectorXd eta, Eigen::MatrixXd sigma)
    : eta_(std::move(eta)), sigma_(std::move(sigma)) {
  const auto d = eta_.size();
  if (d == 0 || static_cast<std::size_t>(d) > kMaxDimension)
    throw InvalidParameters("normal model: unsupported dimension");
  if (sigma_.rows() != d || sigma_.cols() != d)
    throw InvalidParameters("normal model: covariance has wrong shape");
  if (!eta_.allFinite() || !sigma_.allFinite())
    throw InvalidParameters("normal model: parameters must be finite");
  if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-14 * sigma_.cwiseAbs().maxCoeff())
    throw InvalidParameters("normal model: covariance must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(sigma_);
  if (llt.info() != Eigen::Success) throw InvalidParameters("normal model: covariance is not positive definite");
  chol_ = llt.matrixL();
  det_ = 1.0;
  for (Eigen::Index h = 0; h < d; ++h) det_ *= chol_(h, h) * chol_(h, h);
}

cplx NormalModel::evaluate(std::span<const cplx> z) const {
  const std::size_t d = dimension();
  cplx lin = 0.0;
  cplx quad = 0.0;
  for (std::size_t h = 0; h < d; ++h) {
    lin += eta_[h] * z[h];
    cplx row = 0.0;
    for (std::size_t l = 0; l < d; ++l) row += sigma_(h, l) * z[l];
    quad += z[h] * row;
  }
  return std::exp(cplx(0.0, 1.0) * lin - 0.5 * quad);
}

bool NormalModel::admits(std::span<const double> alpha) const {
  return std::all_of(alpha.begin(), alpha.end(), [](double a) { return std::isfinite(a); });
}

std::optional<DampingConstants> NormalModel::damping_constants(std::span<const double> alpha) const {
  const std::size_t d = dimension();
  Eigen::Map<const Eigen::VectorXd> a(alpha.data(), static_cast<Eigen::Index>(d));
  const Eigen::VectorXd sa = sigma_ * a;
  const Eigen::VectorXd mu = eta_ + sa;
  return DampingConstants{std::exp(-eta_.dot(a) - 0.5 * a.dot(sa)),
                          std::vector<double>(mu.data(), mu.data() + d)};
}

std::optional<double> NormalModel::damped_moment(std::span<const double>, std::size_t h,
                                                 int n) const {
  if (n % 2 != 0) return 0.0;
  return double_factorial(n - 1) * std::pow(sigma_(h, h), n / 2);
}

std::optional<double> NormalModel::damped_cf_l2_closed_form(std::span<const double>) const {
  const double d = static_cast<double>(dimension());
  return std::pow(2.0, -d) / std::sqrt(std::pow(std::numbers::pi, d) * det_);
}

VarianceGammaModel::VarianceGammaModel(double a, double s, std::vector<double> eta,
                                       std::vector<double> theta, std::vector<double> sigma)
    : a_(a), s_(s), eta_(std::move(eta)), theta_(std::move(theta)), sigma_(std::move(sigma)) {
  if (!(a_ > 0.0) || !std::isfinite(a_)) throw InvalidParameters("VG model: a must be positive");
  if (!(s_ > 0.0) || !std::isfinite(s_)) throw InvalidParameters("VG model: s must be positive");
  const std::size_t d = eta_.size();
  if (d == 0 || d > kMaxDimension) throw InvalidParameters("VG model: unsupported dimension");
  if (theta_.size() != d || sigma_.size() != d)
    throw InvalidParameters("VG model: parameter vectors differ in length");
  require_positive(sigma_, "VG model: sigma");
  for (std::size_t h = 0; h < d; ++h)
    if (!std::isfinite(eta_[h]) || !std::isfinite(theta_[h]))
      throw InvalidParameters("VG model: parameters must be finite");
}

double VarianceGammaModel::zeta(std::span<const double> alpha) const {
  double z = 1.0;
  for (std::size_t h = 0; h < eta_.size(); ++h)
    z -= s_ * theta_[h] * alpha[h] + 0.5 * s_ * sigma_[h] * sigma_[h] * alpha[h] * alpha[h];
  return z;
}

cplx VarianceGammaModel::evaluate(std::span<const cplx> z) const {
  const std::size_t d = dimension();
  std::array<double, kMaxDimension> alpha;
  for (std::size_t h = 0; h < d; ++h) alpha[h] = -z[h].imag();
  if (!(zeta(std::span<const double>(alpha.data(), d)) > 0.0))
    throw StripViolation("VG characteristic function evaluated outside its strip (zeta <= 0)");
  const cplx i(0.0, 1.0);
  cplx lin = 0.0;
  cplx base = 1.0;
  for (std::size_t h = 0; h < d; ++h) {
    lin += eta_[h] * z[h];
    base += -i * s_ * theta_[h] * z[h] + 0.5 * s_ * sigma_[h] * sigma_[h] * z[h] * z[h];
  }
  return std::exp(i * lin - a_ * std::log(base));
}

bool VarianceGammaModel::admits(std::span<const double> alpha) const {
  for (double a : alpha)
    if (!std::isfinite(a)) return false;
  return zeta(alpha) > 0.0;
}

std::optional<DampingConstants> VarianceGammaModel::damping_constants(
    std::span<const double> alpha) const {
  const std::size_t d = dimension();
  const double z = zeta(alpha);
  double ea = 0.0;
  std::vector<double> mu(d);
  for (std::size_t h = 0; h < d; ++h) {
    ea += eta_[h] * alpha[h];
    mu[h] = eta_[h] + a_ * s_ * (theta_[h] + sigma_[h] * sigma_[h] * alpha[h]) / z;
  }
  return DampingConstants{std::exp(-ea + a_ * std::log(z)), std::move(mu)};
}

std::vector<double> VarianceGammaModel::damped_cumulants(std::span<const double> alpha,
                                                         std::size_t h, int n) const {
  const double sd = s_ / zeta(alpha);
  const double th = theta_[h] + sigma_[h] * sigma_[h] * alpha[h];
  const double disc = std::sqrt(sd * sd * th * th + 2.0 * sd * sigma_[h] * sigma_[h]);
  const double r1 = 0.5 * (sd * th + disc);
  const double r2 = 0.5 * (sd * th - disc);
  std::vector<double> kappa(static_cast<std::size_t>(n) + 1, 0.0);
  double fact = 1.0;  // (j-1)!
  for (int j = 2; j <= n; ++j) {
    fact *= j - 1;
    kappa[j] = a_ * fact * (std::pow(r1, j) + std::pow(r2, j));
  }
  return kappa;
}

std::optional<double> VarianceGammaModel::damped_moment(std::span<const double> alpha,
                                                        std::size_t h, int n) const {
  return moments_from_cumulants(damped_cumulants(alpha, h, n))[n];
}

bool VarianceGammaModel::damped_cf_is_real(std::span<const double> alpha) const {
  for (std::size_t h = 0; h < dimension(); ++h)
    if (theta_[h] + sigma_[h] * sigma_[h] * alpha[h] != 0.0) return false;
  return true;
}

std::optional<double> VarianceGammaModel::doubled_density_at_zero(
    std::span<const double> alpha) const {
  if (!damped_cf_is_real(alpha)) return std::nullopt;
  const double d = static_cast<double>(dimension());
  const double shape = 2.0 * a_;
  if (!(shape > 0.5 * d)) return std::nullopt;
  const double sd = s_ / zeta(alpha);
  double log_sig = 0.0;
  for (double sg : sigma_) log_sig += std::log(sg);
  return std::exp(-0.5 * d * std::log(2.0 * std::numbers::pi) - log_sig +
                  std::lgamma(shape - 0.5 * d) - std::lgamma(shape) - 0.5 * d * std::log(sd));
}

NormalModel bs_log_return_model(const MarketSpec& market, const Eigen::MatrixXd& sigma) {
  const std::size_t d = market.spot.size();
  require_positive(market.spot, "spot");
  if (!(market.maturity > 0.0)) throw InvalidParameters("maturity must be positive");
  if (static_cast<std::size_t>(sigma.rows()) != d || static_cast<std::size_t>(sigma.cols()) != d)
    throw InvalidParameters("covariance dimension does not match spot");
  Eigen::VectorXd eta(d);
  for (std::size_t h = 0; h < d; ++h)
    eta[h] = std::log(market.spot[h]) + (market.rate - 0.5 * sigma(h, h)) * market.maturity;
  return NormalModel(eta, market.maturity * sigma);
}

VarianceGammaModel vg_log_return_model(const MarketSpec& market, double nu,
                                       const std::vector<double>& theta,
                                       const std::vector<double>& sigma) {
  const std::size_t d = market.spot.size();
  require_positive(market.spot, "spot");
  if (!(market.maturity > 0.0)) throw InvalidParameters("maturity must be positive");
  if (!(nu > 0.0)) throw InvalidParameters("nu must be positive");
  if (theta.size() != d || sigma.size() != d)
    throw InvalidParameters("VG market parameters do not match spot dimension");
  std::vector<double> eta(d);
  for (std::size_t h = 0; h < d; ++h) {
    const double arg = 1.0 - 0.5 * sigma[h] * sigma[h] * nu - theta[h] * nu;
    if (!(arg > 0.0)) throw InvalidParameters("VG market: 1 - sigma^2 nu/2 - theta nu must be positive");
    eta[h] = std::log(market.spot[h]) + (market.rate + std::log(arg) / nu) * market.maturity;
  }
  return VarianceGammaModel(market.maturity / nu, nu, std::move(eta), theta, sigma);
}

std::vector<double> moments_from_cumulants(const std::vector<double>& kappa) {
  const std::size_t n = kappa.size() - 1;
  std::vector<double> m(n + 1, 0.0);
  m[0] = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    double binom = 1.0;  // C(k-1, j-1)
    double acc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      acc += binom * kappa[j] * m[k - j];
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j);
    }
    m[k] = acc;
  }
  return m;
}

namespace {

// Fit Re log f^(t e_h) = -k2 t^2/2 + k4 t^4/24 - k6 t^6/720 + k8 t^8/40320 on four points.
std::array<double, 2> numeric_cumulants(const DampedDensity& dd, std::size_t h) {
  std::vector<double> u(dd.dimension(), 0.0);
  auto psi = [&](double t) {
    u[h] = t;
    return std::log(std::abs(dd(u)));
  };
  const double t0 = 1e-3;
  const double pilot = -2.0 * psi(t0) / (t0 * t0);
  if (!(pilot > 0.0) || !std::isfinite(pilot))
    throw MomentUnavailable("no stable numerical variance estimate");
  const double delta = 0.1 / std::sqrt(pilot);
  Eigen::Matrix4d a;
  Eigen::Vector4d b;
  const double coef[4] = {-0.5, 1.0 / 24.0, -1.0 / 720.0, 1.0 / 40320.0};
  for (int j = 0; j < 4; ++j) {
    const double t = (j + 1) * delta;
    for (int c = 0; c < 4; ++c) a(j, c) = coef[c] * std::pow(t, 2 * (c + 1));
    b[j] = psi(t);
  }
  const Eigen::Vector4d k = a.fullPivLu().solve(b);
  return {k[0], k[1]};
}

}  // namespace

double axis_moment(const DampedDensity& dd, std::size_t h, int n) {
  if (h >= dd.dimension()) throw InvalidParameters("axis index out of range");
  if (n < 2 || n % 2 != 0) throw InvalidParameters("moment order must be even and at least 2");
  if (auto m = dd.model().damped_moment(dd.alpha(), h, n)) {
    if (!(*m > 0.0) || !std::isfinite(*m)) throw MomentUnavailable("moment is not finite");
    return *m;
  }
  if (n > 4) throw MomentUnavailable("no closed-form moment of order " + std::to_string(n));
  const auto [k2, k4] = numeric_cumulants(dd, h);
  const double m = n == 2 ? k2 : k4 + 3.0 * k2 * k2;
  if (!(m > 0.0)) throw MomentUnavailable("numerical moment estimate is not positive");
  return m;
}

double cf_l2_norm(const DampedDensity& dd) {
  const auto decay = dd.model().decay();
  const double d = static_cast<double>(dd.dimension());
  if (!decay.exponential && !(decay.p > 0.5 * d))
    throw NotSquareIntegrable("characteristic function decays too slowly to be square integrable");
  if (auto v = dd.model().damped_cf_l2_closed_form(dd.alpha())) return *v;
  if (dd.real_cf())
    if (auto v = dd.model().doubled_density_at_zero(dd.alpha())) return *v;
  return cf_l2_norm_quadrature(dd);
}

namespace {

std::vector<std::vector<double>> probe_directions(std::size_t d) {
  std::vector<std::vector<double>> dirs;
  for (std::size_t h = 0; h < d; ++h) {
    std::vector<double> e(d, 0.0);
    e[h] = 1.0;
    dirs.push_back(e);
  }
  if (d > 1) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << (d - 1)); ++mask) {
      std::vector<double> e(d, 1.0);
      for (std::size_t h = 1; h < d; ++h)
        if (mask & (std::size_t{1} << (h - 1))) e[h] = -1.0;
      dirs.push_back(e);
    }
  }
  return dirs;
}

double abs2_along(const DampedDensity& dd, const std::vector<double>& dir, double t) {
  std::vector<double> u(dir.size());
  for (std::size_t h = 0; h < dir.size(); ++h) u[h] = t * dir[h];
  return std::norm(dd(u));
}

double radius_below(const DampedDensity& dd, const std::vector<std::vector<double>>& dirs,
                    double threshold) {
  double r = 1e-2;
  for (const auto& dir : dirs) {
    while (abs2_along(dd, dir, r) >= threshold && r < 1e12) r *= 2.0;
  }
  return r;
}

template <int Q>
double tensor_gauss(const DampedDensity& dd, const std::vector<double>& edges) {
  using rule = boost::math::quadrature::gauss<double, Q>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  std::vector<double> pos_nodes, pos_weights;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double c = 0.5 * (edges[p] + edges[p + 1]);
    const double r = 0.5 * (edges[p + 1] - edges[p]);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] == 0.0) {
        pos_nodes.push_back(c);
        pos_weights.push_back(r * w[j]);
        continue;
      }
      pos_nodes.push_back(c - r * x[j]);
      pos_weights.push_back(r * w[j]);
      pos_nodes.push_back(c + r * x[j]);
      pos_weights.push_back(r * w[j]);
    }
  }
  std::vector<double> nodes, weights;
  for (std::size_t j = 0; j < pos_nodes.size(); ++j) {
    nodes.push_back(pos_nodes[j]);
    weights.push_back(pos_weights[j]);
    nodes.push_back(-pos_nodes[j]);
    weights.push_back(pos_weights[j]);
  }
  const std::size_t d = dd.dimension();
  const std::size_t m = nodes.size();
  const std::size_t m0 = pos_nodes.size();
  // |f^(-u)| = |f^(u)|, so the first axis only runs over the positive half.
  std::size_t total = m0;
  for (std::size_t h = 1; h < d; ++h) total *= m;
  std::vector<double> u(d);
  long double acc = 0.0L;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    double wt = 1.0;
    for (std::size_t h = d; h-- > 1;) {
      const std::size_t j = rest % m;
      rest /= m;
      u[h] = nodes[j];
      wt *= weights[j];
    }
    u[0] = pos_nodes[rest];
    wt *= pos_weights[rest];
    acc += wt * std::norm(dd(u));
  }
  return 2.0 * static_cast<double>(acc) / std::pow(2.0 * std::numbers::pi, static_cast<double>(d));
}

}  // namespace

double cf_l2_norm_quadrature(const DampedDensity& dd) {
  const std::size_t d = dd.dimension();
  const auto decay = dd.model().decay();
  if (!decay.exponential && !(decay.p > 0.5 * static_cast<double>(d)))
    throw NotSquareIntegrable("characteristic function decays too slowly to be square integrable");
  const auto dirs = probe_directions(d);
  const double core = radius_below(dd, dirs, 1e-3);
  double U;
  if (decay.exponential) {
    U = 1.25 * radius_below(dd, dirs, 1e-18);
  } else {
    const double two_p = 2.0 * decay.p;
    double c_max = 0.0;
    for (const auto& dir : dirs) {
      double t = core;
      double c = abs2_along(dd, dir, t) * std::pow(t, two_p);
      for (int it = 0; it < 60; ++it) {
        const double c2 = abs2_along(dd, dir, 2 * t) * std::pow(2 * t, two_p);
        t *= 2;
        const bool settled = std::abs(c2 / c - 1.0) < 1e-3;
        c = c2;
        if (settled) break;
      }
      c_max = std::max(c_max, c);
    }
    U = std::pow(c_max / 1e-12, 1.0 / (two_p - static_cast<double>(d)));
  }
  U = std::max(U, 4.0 * core);
  std::vector<double> edges;
  const int core_panels = 4;
  for (int j = 0; j <= core_panels; ++j) edges.push_back(core * j / core_panels);
  for (double e = 2 * core; e < U; e *= 2) edges.push_back(e);
  edges.push_back(U);

  double fine = 0.0;
  for (int refine = 0; refine < 3; ++refine) {
    const double coarse = tensor_gauss<20>(dd, edges);
    fine = tensor_gauss<30>(dd, edges);
    if (std::abs(coarse - fine) <= 1e-11 * fine) break;
    std::vector<double> split;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      split.push_back(edges[p]);
      split.push_back(0.5 * (edges[p] + edges[p + 1]));
    }
    split.push_back(edges.back());
    edges = std::move(split);
  }
  return fine;
}

}  // namespace dcos
