#include "dcos/engine.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "dcos/errors.hpp"
#include "dcos/parallel.hpp"
#include "dcos/special.hpp"

namespace dcos {

using cplx = std::complex<double>;

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

int zero_count(std::span<const int> k) {
  int z = 0;
  for (int kh : k) z += kh == 0;
  return z;
}

double primed_weight(std::span<const int> k) { return std::ldexp(1.0, -zero_count(k)); }

GridShape::GridShape(std::vector<int> n) : n_(std::move(n)), size_(1) {
  for (int nh : n_) {
    if (nh < 0) throw InvalidParameters("number of terms must be nonnegative");
    const auto ext = static_cast<std::size_t>(nh) + 1;
    if (size_ > std::numeric_limits<std::size_t>::max() / ext)
      size_ = std::numeric_limits<std::size_t>::max();
    else
      size_ *= ext;
  }
}

void GridShape::unravel(std::size_t index, int* k) const {
  for (std::size_t h = n_.size(); h-- > 0;) {
    const auto ext = static_cast<std::size_t>(n_[h]) + 1;
    k[h] = static_cast<int>(index % ext);
    index /= ext;
  }
}

namespace {

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

}  // namespace

std::size_t shell_size(std::size_t d, int n) {
  if (n == 0) return 1;
  const auto m = static_cast<std::size_t>(n);
  std::size_t total = 0;
  for (std::size_t j = 0; j < d; ++j) total += ipow(m, j) * ipow(m + 1, d - 1 - j);
  return total;
}

void shell_index(std::size_t d, int n, std::size_t index, int* k) {
  if (n == 0) {
    for (std::size_t h = 0; h < d; ++h) k[h] = 0;
    return;
  }
  const auto m = static_cast<std::size_t>(n);
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t count = ipow(m, j) * ipow(m + 1, d - 1 - j);
    if (index >= count) {
      index -= count;
      continue;
    }
    for (std::size_t h = d; h-- > j + 1;) {
      k[h] = static_cast<int>(index % (m + 1));
      index /= m + 1;
    }
    k[j] = n;
    for (std::size_t h = j; h-- > 0;) {
      k[h] = static_cast<int>(index % m);
      index /= m;
    }
    return;
  }
  throw InvalidParameters("shell index out of range");
}

double basis_eval(std::span<const int> k, std::span<const double> L, std::span<const double> x) {
  double r = 1.0;
  for (std::size_t h = 0; h < k.size(); ++h)
    r *= std::cos(k[h] * std::numbers::pi * (x[h] + L[h]) / (2.0 * L[h]));
  return r;
}

double coefficient(const DampedDensity& dd, std::span<const double> L, std::span<const int> k) {
  const std::size_t d = dd.dimension();
  const std::size_t n_signs = std::size_t{1} << (d - 1);
  std::array<double, kMaxDimension> u;
  double acc = 0.0;
  double scale = static_cast<double>(n_signs);
  for (std::size_t h = 0; h < d; ++h) scale *= L[h];
  for (std::size_t mask = 0; mask < n_signs; ++mask) {
    long sk = 0;
    for (std::size_t h = 0; h < d; ++h) {
      const int s = (h > 0 && (mask & (std::size_t{1} << (h - 1)))) ? -1 : 1;
      u[h] = 0.5 * std::numbers::pi * s * k[h] / L[h];
      sk += s * k[h];
    }
    acc += (dd(std::span<const double>(u.data(), d)) * i_pow(sk)).real();
  }
  return acc / scale;
}

std::vector<double> coefficient_tensor(const DampedDensity& dd, std::span<const double> L,
                                       std::span<const int> N, const EngineOptions& options) {
  const std::size_t d = dd.dimension();
  if (L.size() != d || N.size() != d) throw InvalidParameters("plan dimensions do not match the density");
  GridShape shape(std::vector<int>(N.begin(), N.end()));
  if (shape.size() > options.max_entries)
    throw AllocationTooLarge("coefficient tensor would have " + std::to_string(shape.size()) + " entries");
  std::vector<double> c(shape.size());
  const bool skip_odd = dd.real_cf();
  parallel_chunks(shape.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    std::array<int, kMaxDimension> k;
    for (std::size_t i = begin; i < end; ++i) {
      shape.unravel(i, k.data());
      int sum = 0;
      for (std::size_t h = 0; h < d; ++h) sum += k[h];
      if (skip_odd && sum % 2 != 0) {
        c[i] = 0.0;
        continue;
      }
      c[i] = coefficient(dd, L, std::span<const int>(k.data(), d));
    }
  });
  return c;
}

CosPlan make_plan(const DampedDensity& dd, std::vector<double> M, std::vector<double> L,
                  std::vector<int> N, const EngineOptions& options) {
  const std::size_t d = dd.dimension();
  if (M.size() != d || L.size() != d || N.size() != d)
    throw InvalidParameters("plan dimensions do not match the density");
  for (std::size_t h = 0; h < d; ++h) {
    if (!(M[h] > 0.0) || !(L[h] >= M[h]) || !std::isfinite(L[h]))
      throw InvalidParameters("truncation ranges must satisfy L >= M > 0");
    if (N[h] < 0) throw InvalidParameters("number of terms must be nonnegative");
  }
  CosPlan plan;
  plan.coefficients = coefficient_tensor(dd, L, N, options);
  plan.M = std::move(M);
  plan.L = std::move(L);
  plan.N = std::move(N);
  plan.real_cf = dd.real_cf();
  return plan;
}

ApproxResult approximate_integral(const CosPlan& plan, const CoefficientProvider& provider,
                                  const EngineOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t d = plan.N.size();
  GridShape shape(plan.N);
  if (shape.size() != plan.coefficients.size())
    throw InvalidParameters("coefficient tensor does not match the plan");
  const auto total = ordered_sum(shape.size(), options.threads, [&](std::size_t i) {
    const double c = plan.coefficients[i];
    if (c == 0.0) return 0.0;
    std::array<int, kMaxDimension> k;
    shape.unravel(i, k.data());
    const std::span<const int> ks(k.data(), d);
    return primed_weight(ks) * c * provider(ks);
  });
  ApproxResult result;
  result.value = total.value();
  result.n_terms_used = plan.N;
  result.wall_time = std::chrono::steady_clock::now() - start;
  result.diagnostics["grid_size"] = static_cast<double>(shape.size());
  if (!std::isfinite(result.value)) throw Overflow("COS sum is not finite");
  return result;
}

double price_option(const MarketSpec& market, const ApproxResult& result) {
  return std::exp(-market.rate * market.maturity) * result.value;
}

}  // namespace dcos
