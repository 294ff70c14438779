#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>

#include "dcos/engine.hpp"
#include "dcos/models.hpp"
#include "dcos/payoffs.hpp"
#include "dcos/tuning.hpp"

namespace dcos {

struct McResult {
  double estimate = 0.0;
  double half_width_99 = 0.0;
  double variance = 0.0;  // sample variance of the discounted payoff
  std::uint64_t n_paths = 0;
  std::uint64_t seed = 0;
};

using PathFunctional = std::function<double(std::span<const double>)>;

// Paths are generated in blocks of kMcBlock; block b draws from a std::mt19937_64 seeded with
// seed_seq{seed_lo, seed_hi, b}, so results do not depend on the number of workers.
inline constexpr std::uint64_t kMcBlock = 1 << 16;

McResult mc_estimate(const CharacteristicModel& model, const Payoff& payoff,
                     const std::optional<MarketSpec>& market, std::uint64_t n_paths,
                     std::uint64_t seed, unsigned threads = 0);
McResult mc_estimate(const CharacteristicModel& model, const PathFunctional& payoff,
                     double discount, std::uint64_t n_paths, std::uint64_t seed,
                     unsigned threads = 0);

std::uint64_t required_paths(double target_epsilon, double variance_estimate);

double normal_cdf_closed_form(const NormalModel& model, std::span<const double> y);

// per-axis term count used by the self-oracle when none is given
int default_oracle_terms(std::size_t d);
double high_res_cos_oracle(const Problem& problem, int n_per_axis = 0,
                           const EngineOptions& options = {});

}  // namespace dcos
