#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "dcos/models.hpp"

namespace dcos {

using DampingFactor = std::vector<double>;

bool is_undamped(std::span<const double> alpha);

// f(x) = lambda exp(alpha.(x + mu)) g(x + mu), centered so that int x f(x) dx = 0.
class DampedDensity {
 public:
  DampedDensity(std::shared_ptr<const CharacteristicModel> model, DampingFactor alpha,
                double lambda, std::vector<double> mu, bool real_cf);

  std::complex<double> operator()(std::span<const double> u) const;

  const CharacteristicModel& model() const { return *model_; }
  std::shared_ptr<const CharacteristicModel> model_ptr() const { return model_; }
  const DampingFactor& alpha() const { return alpha_; }
  double lambda() const { return lambda_; }
  const std::vector<double>& mu() const { return mu_; }
  std::size_t dimension() const { return alpha_.size(); }
  bool real_cf() const { return real_cf_; }

 private:
  std::shared_ptr<const CharacteristicModel> model_;
  DampingFactor alpha_;
  double lambda_;
  std::vector<double> mu_;
  bool real_cf_;
};

DampedDensity build_damped_density(std::shared_ptr<const CharacteristicModel> model,
                                   DampingFactor alpha);

// numerical lambda and mu, used when the model has no closed form
DampingConstants numeric_damping_constants(const CharacteristicModel& model,
                                           std::span<const double> alpha);

std::complex<double> eval_damped_cf(const DampedDensity& dd, std::span<const double> u);

}  // namespace dcos
