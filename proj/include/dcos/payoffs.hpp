#pragma once

#include <complex>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dcos/damping.hpp"

namespace dcos {

struct CdfPayoff {
  std::vector<double> y;
};
struct DigitalPutPayoff {
  std::vector<double> strike;
};
struct BasketPutPayoff {
  double strike;
};
struct VanillaPutPayoff {
  double strike;
};
enum class AbsBranch { positive_part, negative_part };
struct AbsMomentPayoff {
  AbsBranch branch;
};

using Payoff =
    std::variant<CdfPayoff, DigitalPutPayoff, BasketPutPayoff, VanillaPutPayoff, AbsMomentPayoff>;

enum class AlphaRequirement { any, strictly_negative, zero_only };

struct PayoffBounds {
  double sup_norm;
  double l2_norm_sq;
};

struct BoxGeometry {
  std::vector<double> M;
  std::vector<double> L;
};

using CoefficientProvider = std::function<double(std::span<const int>)>;

std::string payoff_name(const Payoff& payoff);
AlphaRequirement required_alpha_sign(const Payoff& payoff);
void validate_payoff(const Payoff& payoff, std::size_t d);
// w(x) in log-price coordinates
double evaluate_payoff(const Payoff& payoff, std::span<const double> x);
bool has_transform(const Payoff& payoff);

std::complex<double> digital_put_transform(std::span<const double> strike,
                                           std::span<const std::complex<double>> z);
std::complex<double> basket_put_transform(double strike, std::span<const std::complex<double>> z);
std::complex<double> payoff_transform(const Payoff& payoff, std::span<const std::complex<double>> z);

double cdf_vk(std::span<const double> y, const BoxGeometry& geometry, double lambda,
              std::span<const double> mu, std::span<const int> k);
double vanilla_put_vk(double strike, const BoxGeometry& geometry, double lambda,
                      std::span<const double> mu, std::span<const int> k);
double abs_moment_vk(const BoxGeometry& geometry, double alpha, double lambda,
                     std::span<const double> mu, AbsBranch branch, std::span<const int> k);

double payoff_vk_tilde(const Payoff& payoff, const DampedDensity& dd, std::span<const double> L,
                       std::span<const int> k);

PayoffBounds payoff_bounds(const Payoff& payoff, const DampedDensity& dd,
                           std::span<const double> M);

// closed-form v_k when available for the damping in dd, transform-based v~_k otherwise
CoefficientProvider make_coefficient_provider(const Payoff& payoff, const DampedDensity& dd,
                                              const BoxGeometry& geometry);

}  // namespace dcos
