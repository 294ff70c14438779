#include "dcos/damping.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "dcos/errors.hpp"

namespace dcos {

using cplx = std::complex<double>;

bool is_undamped(std::span<const double> alpha) {
  for (double a : alpha)
    if (a != 0.0) return false;
  return true;
}

DampedDensity::DampedDensity(std::shared_ptr<const CharacteristicModel> model,
                             DampingFactor alpha, double lambda, std::vector<double> mu,
                             bool real_cf)
    : model_(std::move(model)),
      alpha_(std::move(alpha)),
      lambda_(lambda),
      mu_(std::move(mu)),
      real_cf_(real_cf) {}

cplx DampedDensity::operator()(std::span<const double> u) const {
  const std::size_t d = alpha_.size();
  std::array<cplx, kMaxDimension> z;
  double phase = 0.0;
  for (std::size_t h = 0; h < d; ++h) {
    z[h] = cplx(u[h], -alpha_[h]);
    phase += u[h] * mu_[h];
  }
  const cplx g = model_->evaluate(std::span<const cplx>(z.data(), d));
  return lambda_ * cplx(std::cos(phase), -std::sin(phase)) * g;
}

cplx eval_damped_cf(const DampedDensity& dd, std::span<const double> u) { return dd(u); }

DampingConstants numeric_damping_constants(const CharacteristicModel& model,
                                           std::span<const double> alpha) {
  const std::size_t d = alpha.size();
  std::vector<cplx> z(d);
  for (std::size_t h = 0; h < d; ++h) z[h] = cplx(0.0, -alpha[h]);
  const cplx g0 = model.evaluate(z);
  const double lambda = 1.0 / g0.real();
  const double delta = std::pow(std::numeric_limits<double>::epsilon(), 0.2);
  std::vector<double> mu(d);
  for (std::size_t h = 0; h < d; ++h) {
    auto shifted = [&](double t) {
      auto w = z;
      w[h] += t;
      return model.evaluate(w);
    };
    const cplx deriv = (-shifted(2 * delta) + 8.0 * shifted(delta) - 8.0 * shifted(-delta) +
                        shifted(-2 * delta)) /
                       (12.0 * delta);
    // mu_h = Re(-i lambda d/du_h g^(u - i alpha)) at u = 0
    mu[h] = lambda * deriv.imag();
  }
  return {lambda, mu};
}

DampedDensity build_damped_density(std::shared_ptr<const CharacteristicModel> model,
                                   DampingFactor alpha) {
  if (!model) throw InvalidParameters("null characteristic model");
  const std::size_t d = model->dimension();
  if (d == 0 || d > kMaxDimension) throw InvalidParameters("unsupported dimension");
  if (alpha.empty()) alpha.assign(d, 0.0);
  if (alpha.size() != d) throw InvalidParameters("damping factor has wrong length");
  for (double a : alpha)
    if (!std::isfinite(a)) throw InvalidParameters("damping factor must be finite");
  if (!model->admits(alpha)) {
    std::ostringstream msg;
    msg << "damping factor outside the admissible strip of the model (alpha =";
    for (double a : alpha) msg << ' ' << a;
    msg << ')';
    throw StripViolation(msg.str());
  }
  auto consts = model->damping_constants(alpha);
  if (!consts) consts = numeric_damping_constants(*model, alpha);
  if (!(consts->lambda > 0.0) || !std::isfinite(consts->lambda))
    throw StripViolation("g^(-i alpha) is not a positive finite number");
  const bool real = model->damped_cf_is_real(alpha);
  return DampedDensity(std::move(model), std::move(alpha), consts->lambda, std::move(consts->mu),
                       real);
}

}  // namespace dcos
