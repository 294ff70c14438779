#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dcos/damping.hpp"
#include "dcos/payoffs.hpp"

namespace dcos {

struct EngineOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  std::size_t max_entries = std::size_t{1} << 31;
};

using MultiIndex = std::vector<int>;

int zero_count(std::span<const int> k);
double primed_weight(std::span<const int> k);

// Lexicographic layout over 0 <= k <= N, last axis fastest.
class GridShape {
 public:
  explicit GridShape(std::vector<int> n);
  std::size_t size() const { return size_; }
  std::size_t dimension() const { return n_.size(); }
  void unravel(std::size_t index, int* k) const;

 private:
  std::vector<int> n_;
  std::size_t size_;
};

// Multi-indices with max component exactly n, enumerated by the first axis attaining n.
std::size_t shell_size(std::size_t d, int n);
void shell_index(std::size_t d, int n, std::size_t index, int* k);

double basis_eval(std::span<const int> k, std::span<const double> L, std::span<const double> x);
double coefficient(const DampedDensity& dd, std::span<const double> L, std::span<const int> k);

std::vector<double> coefficient_tensor(const DampedDensity& dd, std::span<const double> L,
                                       std::span<const int> N, const EngineOptions& options = {});

struct CosPlan {
  std::vector<double> M;
  std::vector<double> L;
  std::vector<int> N;
  std::vector<double> coefficients;
  bool real_cf = false;
};

CosPlan make_plan(const DampedDensity& dd, std::vector<double> M, std::vector<double> L,
                  std::vector<int> N, const EngineOptions& options = {});

struct ApproxResult {
  double value = 0.0;
  std::vector<int> n_terms_used;
  std::chrono::duration<double> wall_time{0.0};
  std::map<std::string, double> diagnostics;
};

ApproxResult approximate_integral(const CosPlan& plan, const CoefficientProvider& provider,
                                  const EngineOptions& options = {});

double price_option(const MarketSpec& market, const ApproxResult& result);

}  // namespace dcos
