#pragma once

#include <complex>

namespace dcos {

// Principal-ish complex log-gamma; the imaginary part is only defined modulo 2*pi,
// which is all that is needed when the result is exponentiated.
std::complex<double> log_gamma(std::complex<double> z);

double normal_cdf(double x);

// i^m for integer m, exact
inline std::complex<double> i_pow(long m) {
  switch (((m % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Two-sided 99% standard normal quantile z_{0.995}.
double z99();

}  // namespace dcos
