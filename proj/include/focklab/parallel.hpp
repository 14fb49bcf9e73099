#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <type_traits>
#include <vector>

namespace focklab {

/// Worker count: FOCKLAB_THREADS if set, else the hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("FOCKLAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline thread_local bool in_worker = false;

/// Evaluates fn(0..count-1) on a worker pool and returns the results in
/// index order. Results never depend on the worker count. Calls made from
/// inside a worker run serially.
template <class F>
auto parallel_map(std::size_t count, F&& fn) -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(count);
  const unsigned workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1 || in_worker) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto work = [&] {
    in_worker = true;
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  if (error) std::rethrow_exception(error);
  return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for (seed, stream index).
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  return splitmix64(seed + 0x9e3779b97f4a7c15ULL * (salt + 1));
}

}  // namespace focklab
