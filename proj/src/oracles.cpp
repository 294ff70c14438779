#include "dcos/oracles.hpp"

#include <array>
#include <cmath>
#include <random>

#include "dcos/errors.hpp"
#include "dcos/parallel.hpp"
#include "dcos/special.hpp"

namespace dcos {

namespace {

struct Moments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  void merge(const Moments& o) {
    if (o.n == 0) return;
    const double na = static_cast<double>(n);
    const double nb = static_cast<double>(o.n);
    const double delta = o.mean - mean;
    const double nt = na + nb;
    mean += delta * nb / nt;
    m2 += o.m2 + delta * delta * na * nb / nt;
    n += o.n;
  }
};

// Fills x with one draw of the model's law.
class Sampler {
 public:
  explicit Sampler(const CharacteristicModel& model) : d_(model.dimension()) {
    if ((normal_ = dynamic_cast<const NormalModel*>(&model))) return;
    if ((vg_ = dynamic_cast<const VarianceGammaModel*>(&model))) return;
    throw InvalidParameters("Monte Carlo sampling is only available for normal and VG models");
  }

  void draw(std::mt19937_64& rng, std::normal_distribution<double>& gauss,
            std::gamma_distribution<double>& gamma, double* x) const {
    std::array<double, kMaxDimension> z;
    for (std::size_t h = 0; h < d_; ++h) z[h] = gauss(rng);
    if (normal_) {
      const auto& c = normal_->cholesky();
      for (std::size_t h = 0; h < d_; ++h) {
        double v = normal_->eta()[h];
        for (std::size_t l = 0; l <= h; ++l) v += c(h, l) * z[l];
        x[h] = v;
      }
      return;
    }
    const double g = gamma(rng);
    const double sg = std::sqrt(g);
    for (std::size_t h = 0; h < d_; ++h)
      x[h] = vg_->eta()[h] + vg_->theta()[h] * g + sg * vg_->sigma()[h] * z[h];
  }

  std::gamma_distribution<double> gamma_distribution() const {
    if (vg_) return std::gamma_distribution<double>(vg_->a(), vg_->s());
    return std::gamma_distribution<double>(1.0, 1.0);
  }

 private:
  std::size_t d_;
  const NormalModel* normal_ = nullptr;
  const VarianceGammaModel* vg_ = nullptr;
};

}  // namespace

McResult mc_estimate(const CharacteristicModel& model, const PathFunctional& payoff,
                     double discount, std::uint64_t n_paths, std::uint64_t seed, unsigned threads) {
  if (n_paths < 2) throw InvalidParameters("Monte Carlo needs at least two paths");
  const Sampler sampler(model);
  const std::size_t d = model.dimension();
  const std::uint64_t n_blocks = (n_paths + kMcBlock - 1) / kMcBlock;
  std::vector<Moments> blocks(n_blocks);
  parallel_chunks(n_blocks, threads, [&](std::size_t begin, std::size_t end) {
    std::array<double, kMaxDimension> x;
    for (std::size_t b = begin; b < end; ++b) {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> gauss;
      auto gamma = sampler.gamma_distribution();
      const std::uint64_t first = b * kMcBlock;
      const std::uint64_t last = std::min<std::uint64_t>(n_paths, first + kMcBlock);
      Moments acc;
      for (std::uint64_t p = first; p < last; ++p) {
        sampler.draw(rng, gauss, gamma, x.data());
        acc.add(discount * payoff(std::span<const double>(x.data(), d)));
      }
      blocks[b] = acc;
    }
  });
  Moments total;
  for (const auto& b : blocks) total.merge(b);
  McResult r;
  r.estimate = total.mean;
  r.variance = total.m2 / static_cast<double>(total.n - 1);
  r.half_width_99 = z99() * std::sqrt(r.variance / static_cast<double>(total.n));
  r.n_paths = total.n;
  r.seed = seed;
  return r;
}

McResult mc_estimate(const CharacteristicModel& model, const Payoff& payoff,
                     const std::optional<MarketSpec>& market, std::uint64_t n_paths,
                     std::uint64_t seed, unsigned threads) {
  validate_payoff(payoff, model.dimension());
  const double discount = market ? std::exp(-market->rate * market->maturity) : 1.0;
  return mc_estimate(
      model, [&](std::span<const double> x) { return evaluate_payoff(payoff, x); }, discount,
      n_paths, seed, threads);
}

std::uint64_t required_paths(double target_epsilon, double variance_estimate) {
  if (!(target_epsilon > 0.0)) throw InvalidParameters("target epsilon must be positive");
  if (!(variance_estimate >= 0.0)) throw InvalidParameters("variance must be nonnegative");
  const double r = z99() * std::sqrt(variance_estimate) / target_epsilon;
  return static_cast<std::uint64_t>(std::ceil(r * r));
}

double normal_cdf_closed_form(const NormalModel& model, std::span<const double> y) {
  const auto& s = model.sigma();
  const auto d = static_cast<std::size_t>(s.rows());
  if (y.size() != d) throw InvalidParameters("threshold has wrong length");
  for (std::size_t h = 0; h < d; ++h)
    for (std::size_t l = 0; l < d; ++l)
      if (h != l && s(h, l) != 0.0) throw CorrelatedNotSupported("closed-form CDF needs a diagonal covariance");
  double p = 1.0;
  for (std::size_t h = 0; h < d; ++h) p *= normal_cdf((y[h] - model.eta()[h]) / std::sqrt(s(h, h)));
  return p;
}

int default_oracle_terms(std::size_t d) {
  if (d <= 2) return 2000;
  if (d == 3) return 300;
  return 100;
}

double high_res_cos_oracle(const Problem& problem, int n_per_axis, const EngineOptions& options) {
  const std::size_t d = problem.model->dimension();
  if (n_per_axis <= 0) n_per_axis = default_oracle_terms(d);
  Tolerance tol;
  tol.epsilon = 1e-9;
  const auto dd = problem_density(problem);
  SolveOverrides ov;
  ov.M = auto_truncation(problem, dd, tol);
  ov.L = ov.M;
  ov.N = std::vector<int>(d, n_per_axis);
  return solve(problem, tol, ov, options).value;
}

}  // namespace dcos
