#include "dcos/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

namespace dcos {
namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

using cplx = std::complex<double>;

// log(sin(pi z)) without overflow for large |Im z|.
cplx log_sin_pi(cplx z) {
  const double pi = std::numbers::pi;
  if (std::abs(z.imag()) < 15.0) return std::log(std::sin(pi * z));
  const cplx i(0.0, 1.0);
  if (z.imag() > 0.0) {
    return -i * pi * z + std::log(1.0 - std::exp(2.0 * i * pi * z)) + std::log(0.5) +
           i * (pi / 2.0);
  }
  return i * pi * z + std::log(1.0 - std::exp(-2.0 * i * pi * z)) + std::log(0.5) -
         i * (pi / 2.0);
}

}  // namespace

cplx log_gamma(cplx z) {
  const double pi = std::numbers::pi;
  if (z.real() < 0.5) return std::log(pi) - log_sin_pi(z) - log_gamma(1.0 - z);
  z -= 1.0;
  cplx x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const cplx t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double z99() {
  static const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.995);
  return z;
}

}  // namespace dcos
