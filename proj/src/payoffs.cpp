#include "dcos/payoffs.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "dcos/errors.hpp"
#include "dcos/special.hpp"

namespace dcos {

using cplx = std::complex<double>;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

void require_strip(std::span<const cplx> z) {
  for (const auto& zh : z)
    if (!(zh.imag() < 0.0)) throw StripViolation("payoff transform needs Im z < 0 in every coordinate");
}

bool all_negative(std::span<const double> alpha) {
  for (double a : alpha)
    if (!(a < 0.0)) return false;
  return true;
}

}  // namespace

std::string payoff_name(const Payoff& payoff) {
  return std::visit(overloaded{[](const CdfPayoff&) { return std::string("cdf"); },
                               [](const DigitalPutPayoff&) { return std::string("digital_put"); },
                               [](const BasketPutPayoff&) { return std::string("basket_put"); },
                               [](const VanillaPutPayoff&) { return std::string("vanilla_put"); },
                               [](const AbsMomentPayoff&) { return std::string("abs_moment"); }},
                    payoff);
}

AlphaRequirement required_alpha_sign(const Payoff& payoff) {
  return std::visit(
      overloaded{[](const CdfPayoff&) { return AlphaRequirement::zero_only; },
                 [](const DigitalPutPayoff&) { return AlphaRequirement::strictly_negative; },
                 [](const BasketPutPayoff&) { return AlphaRequirement::strictly_negative; },
                 [](const VanillaPutPayoff&) { return AlphaRequirement::zero_only; },
                 [](const AbsMomentPayoff&) { return AlphaRequirement::any; }},
      payoff);
}

void validate_payoff(const Payoff& payoff, std::size_t d) {
  std::visit(overloaded{[&](const CdfPayoff& p) {
                          if (p.y.size() != d) throw InvalidParameters("cdf threshold has wrong length");
                          for (double y : p.y)
                            if (!std::isfinite(y)) throw InvalidParameters("cdf threshold must be finite");
                        },
                        [&](const DigitalPutPayoff& p) {
                          if (p.strike.size() != d) throw InvalidParameters("digital strike has wrong length");
                          for (double k : p.strike)
                            if (!(k > 0.0) || !std::isfinite(k)) throw InvalidParameters("strike must be positive");
                        },
                        [&](const BasketPutPayoff& p) {
                          if (!(p.strike > 0.0) || !std::isfinite(p.strike))
                            throw InvalidParameters("strike must be positive");
                        },
                        [&](const VanillaPutPayoff& p) {
                          if (d != 1) throw InvalidParameters("vanilla put is one-dimensional");
                          if (!(p.strike > 0.0) || !std::isfinite(p.strike))
                            throw InvalidParameters("strike must be positive");
                        },
                        [&](const AbsMomentPayoff&) {
                          if (d != 1) throw InvalidParameters("absolute moment is one-dimensional");
                        }},
             payoff);
}

double evaluate_payoff(const Payoff& payoff, std::span<const double> x) {
  return std::visit(overloaded{[&](const CdfPayoff& p) {
                                 for (std::size_t h = 0; h < x.size(); ++h)
                                   if (x[h] > p.y[h]) return 0.0;
                                 return 1.0;
                               },
                               [&](const DigitalPutPayoff& p) {
                                 for (std::size_t h = 0; h < x.size(); ++h)
                                   if (x[h] > std::log(p.strike[h])) return 0.0;
                                 return 1.0;
                               },
                               [&](const BasketPutPayoff& p) {
                                 double s = 0.0;
                                 for (double xh : x) s += std::exp(xh);
                                 return std::max(p.strike - s, 0.0);
                               },
                               [&](const VanillaPutPayoff& p) {
                                 return std::max(p.strike - std::exp(x[0]), 0.0);
                               },
                               [&](const AbsMomentPayoff& p) {
                                 return p.branch == AbsBranch::positive_part ? std::max(x[0], 0.0)
                                                                             : std::max(-x[0], 0.0);
                               }},
                    payoff);
}

bool has_transform(const Payoff& payoff) {
  return std::holds_alternative<DigitalPutPayoff>(payoff) ||
         std::holds_alternative<BasketPutPayoff>(payoff);
}

cplx digital_put_transform(std::span<const double> strike, std::span<const cplx> z) {
  require_strip(z);
  const cplx i(0.0, 1.0);
  cplx r = 1.0;
  for (std::size_t h = 0; h < z.size(); ++h) r *= std::exp(i * z[h] * std::log(strike[h])) / (i * z[h]);
  return r;
}

cplx basket_put_transform(double strike, std::span<const cplx> z) {
  require_strip(z);
  const cplx i(0.0, 1.0);
  cplx sum = 0.0;
  cplx lg = 0.0;
  for (const auto& zh : z) {
    sum += zh;
    lg += log_gamma(i * zh);
  }
  lg += (1.0 + i * sum) * std::log(strike) - log_gamma(i * sum + 2.0);
  if (lg.real() > std::log(std::numeric_limits<double>::max()))
    throw Overflow("basket transform exceeds the floating-point range");
  return std::exp(lg);
}

cplx payoff_transform(const Payoff& payoff, std::span<const cplx> z) {
  if (const auto* p = std::get_if<DigitalPutPayoff>(&payoff)) return digital_put_transform(p->strike, z);
  if (const auto* p = std::get_if<BasketPutPayoff>(&payoff)) return basket_put_transform(p->strike, z);
  throw DampingNotSupported(payoff_name(payoff) + " has no Fourier transform");
}

double cdf_vk(std::span<const double> y, const BoxGeometry& geometry, double lambda,
              std::span<const double> mu, std::span<const int> k) {
  double v = 1.0 / lambda;
  for (std::size_t h = 0; h < k.size(); ++h) {
    const double M = geometry.M[h];
    const double L = geometry.L[h];
    const double gamma = std::min(y[h] - mu[h], M);
    if (gamma < -M) return 0.0;
    if (k[h] == 0) {
      v *= gamma + M;
    } else {
      const double w = k[h] * std::numbers::pi / (2.0 * L);
      v *= (std::sin(w * (gamma + L)) - std::sin(w * (L - M))) / w;
    }
  }
  return v;
}

double vanilla_put_vk(double strike, const BoxGeometry& geometry, double lambda,
                      std::span<const double> mu, std::span<const int> k) {
  const double M = geometry.M[0];
  const double L = geometry.L[0];
  const double gamma = std::min(std::log(strike) - mu[0], M);
  if (gamma <= -M) return 0.0;
  const double w = k[0] * std::numbers::pi / (2.0 * L);
  // int K cos(w(x+L)) and int e^x cos(w(x+L)) over [-M, gamma]
  double psi;
  if (k[0] == 0) {
    psi = gamma + M;
  } else {
    psi = (std::sin(w * (gamma + L)) - std::sin(w * (L - M))) / w;
  }
  auto chi_at = [&](double x) {
    return std::exp(x) * (std::cos(w * (x + L)) + w * std::sin(w * (x + L))) / (1.0 + w * w);
  };
  const double chi = chi_at(gamma) - chi_at(-M);
  return (strike * psi - std::exp(mu[0]) * chi) / lambda;
}

double abs_moment_vk(const BoxGeometry& geometry, double alpha, double lambda,
                     std::span<const double> mu, AbsBranch branch, std::span<const int> k) {
  const double M = geometry.M[0];
  const double L = geometry.L[0];
  const double m = mu[0];
  double lo = -M;
  double hi = M;
  double sign = 1.0;
  if (branch == AbsBranch::positive_part) {
    lo = std::max(-M, -m);
  } else {
    hi = std::min(M, -m);
    sign = -1.0;
  }
  if (!(hi > lo)) return 0.0;
  const double w = k[0] * std::numbers::pi / (2.0 * L);
  // Re of e^{i w L} int (x + m) e^{c x} dx with c = -alpha + i w
  const cplx c(-alpha, w);
  cplx prim_hi, prim_lo;
  if (c == cplx(0.0, 0.0)) {
    prim_hi = 0.5 * (hi + m) * (hi + m);
    prim_lo = 0.5 * (lo + m) * (lo + m);
  } else {
    auto prim = [&](double x) { return std::exp(c * x) * ((x + m) / c - 1.0 / (c * c)); };
    prim_hi = prim(hi);
    prim_lo = prim(lo);
  }
  const cplx phase(std::cos(w * L), std::sin(w * L));
  return sign * std::exp(-alpha * m) / lambda * (phase * (prim_hi - prim_lo)).real();
}

double payoff_vk_tilde(const Payoff& payoff, const DampedDensity& dd, std::span<const double> L,
                       std::span<const int> k) {
  const std::size_t d = dd.dimension();
  const auto& alpha = dd.alpha();
  const auto& mu = dd.mu();
  const std::size_t n_signs = std::size_t{1} << (d - 1);
  std::array<cplx, kMaxDimension> z;
  double acc = 0.0;
  for (std::size_t mask = 0; mask < n_signs; ++mask) {
    long sk = 0;
    double phase = 0.0;
    for (std::size_t h = 0; h < d; ++h) {
      const int s = (h > 0 && (mask & (std::size_t{1} << (h - 1)))) ? -1 : 1;
      const double u = 0.5 * std::numbers::pi * s * k[h] / L[h];
      sk += s * k[h];
      phase += u * mu[h];
      z[h] = cplx(u, alpha[h]);
    }
    const cplx w = payoff_transform(payoff, std::span<const cplx>(z.data(), d));
    const cplx v = cplx(std::cos(phase), -std::sin(phase)) * w / dd.lambda();
    acc += (v * i_pow(sk)).real();
  }
  return acc / static_cast<double>(n_signs);
}

PayoffBounds payoff_bounds(const Payoff& payoff, const DampedDensity& dd,
                           std::span<const double> M) {
  const auto& alpha = dd.alpha();
  const double il = 1.0 / dd.lambda();
  double box = 1.0;
  for (double m : M) box *= 2.0 * m;
  return std::visit(
      overloaded{
          [&](const CdfPayoff&) { return PayoffBounds{il, il * il * box}; },
          [&](const DigitalPutPayoff& p) {
            if (is_undamped(alpha)) return PayoffBounds{il, il * il * box};
            double log_sup = 0.0;
            double l2 = il * il;
            for (std::size_t h = 0; h < alpha.size(); ++h) {
              const double lk = std::log(p.strike[h]);
              log_sup -= alpha[h] * lk;
              l2 *= std::exp(-2.0 * alpha[h] * lk) / (-2.0 * alpha[h]);
            }
            return PayoffBounds{il * std::exp(log_sup), l2};
          },
          [&](const BasketPutPayoff& p) {
            if (is_undamped(alpha)) return PayoffBounds{il * p.strike, il * il * box * p.strike * p.strike};
            double sa = 0.0;
            double lg = 0.0;
            for (double a : alpha) {
              sa += a;
              lg += std::lgamma(-2.0 * a);
            }
            lg -= std::lgamma(1.0 - 2.0 * sa);
            const double lk = std::log(p.strike);
            return PayoffBounds{il * std::exp((1.0 - sa) * lk),
                                il * il * std::exp((2.0 - 2.0 * sa) * lk + lg)};
          },
          [&](const VanillaPutPayoff& p) {
            return PayoffBounds{il * p.strike, il * il * box * p.strike * p.strike};
          },
          [&](const AbsMomentPayoff& p) {
            const double a = alpha[0];
            const double m = dd.mu()[0];
            // sup of t e^{b t} for t in [lo, hi], t >= 0
            double lo, hi, b;
            if (p.branch == AbsBranch::positive_part) {
              lo = std::max(0.0, m - M[0]);
              hi = m + M[0];
              b = -a;
            } else {
              lo = std::max(0.0, -(m + M[0]));
              hi = -(m - M[0]);
              b = a;
            }
            double sup = 0.0;
            if (hi > lo) {
              auto g = [&](double t) { return t * std::exp(b * t); };
              sup = std::max(g(lo), g(hi));
              if (b < 0.0 && -1.0 / b > lo && -1.0 / b < hi) sup = std::max(sup, g(-1.0 / b));
            }
            sup *= il;
            return PayoffBounds{sup, box * sup * sup};
          }},
      payoff);
}

CoefficientProvider make_coefficient_provider(const Payoff& payoff, const DampedDensity& dd,
                                              const BoxGeometry& geometry) {
  validate_payoff(payoff, dd.dimension());
  const auto& alpha = dd.alpha();
  const bool undamped = is_undamped(alpha);
  const double lambda = dd.lambda();
  const auto mu = dd.mu();
  switch (required_alpha_sign(payoff)) {
    case AlphaRequirement::zero_only:
      if (!undamped)
        throw DampingNotSupported(payoff_name(payoff) + " coefficients are only available without damping");
      break;
    case AlphaRequirement::strictly_negative:
      if (!all_negative(alpha))
        throw StripViolation(payoff_name(payoff) + " needs a strictly negative damping factor");
      break;
    case AlphaRequirement::any:
      break;
  }
  if (const auto* p = std::get_if<CdfPayoff>(&payoff)) {
    return [y = p->y, geometry, lambda, mu](std::span<const int> k) {
      return cdf_vk(y, geometry, lambda, mu, k);
    };
  }
  if (const auto* p = std::get_if<VanillaPutPayoff>(&payoff)) {
    return [K = p->strike, geometry, lambda, mu](std::span<const int> k) {
      return vanilla_put_vk(K, geometry, lambda, mu, k);
    };
  }
  if (const auto* p = std::get_if<AbsMomentPayoff>(&payoff)) {
    return [branch = p->branch, a = alpha[0], geometry, lambda, mu](std::span<const int> k) {
      return abs_moment_vk(geometry, a, lambda, mu, branch, k);
    };
  }
  return [payoff, dd, L = geometry.L](std::span<const int> k) {
    return payoff_vk_tilde(payoff, dd, L, k);
  };
}

}  // namespace dcos
