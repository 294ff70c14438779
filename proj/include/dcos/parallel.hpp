#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dcos {

unsigned resolve_threads(unsigned requested);

// Neumaier compensated sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum);
    add(other.comp);
  }
  double value() const { return sum + comp; }
};

inline constexpr std::size_t kChunk = 4096;

// Runs body(begin, end) over fixed-size chunks of [0, count). Chunk boundaries do not
// depend on the thread count.
template <class Body>
void parallel_chunks(std::size_t count, unsigned threads, Body&& body) {
  const std::size_t n_chunks = (count + kChunk - 1) / kChunk;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(n_chunks, 1)));
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) body(c * kChunk, std::min(count, (c + 1) * kChunk));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        body(c * kChunk, std::min(count, (c + 1) * kChunk));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(n_chunks);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Sum of term(i) over [0, count): compensated per chunk, chunks combined in index order,
// so the result is bitwise independent of the thread count.
template <class Term>
CompensatedSum ordered_sum(std::size_t count, unsigned threads, Term&& term) {
  const std::size_t n_chunks = (count + kChunk - 1) / kChunk;
  std::vector<CompensatedSum> partial(n_chunks);
  parallel_chunks(count, threads, [&](std::size_t begin, std::size_t end) {
    CompensatedSum s;
    for (std::size_t i = begin; i < end; ++i) s.add(term(i));
    partial[begin / kChunk] = s;
  });
  CompensatedSum total;
  for (const auto& p : partial) total.add(p);
  return total;
}

}  // namespace dcos
