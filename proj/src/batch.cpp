#include "iffca/batch.hpp"

#include <atomic>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "iffca/engine.hpp"

namespace iffca {

BatchStats run_batch(const Scenario& s, std::uint64_t seed_begin, std::uint64_t seed_end,
                     int threads, const ProgressFn& progress) {
  if (seed_end < seed_begin) throw std::invalid_argument("run_batch: empty seed range");
  const std::uint64_t total64 = seed_end - seed_begin + 1;
  if (total64 > (1u << 30)) throw std::invalid_argument("run_batch: seed range too large");
  const int total = static_cast<int>(total64);

  if (threads <= 0) {
    unsigned hw = std::thread::hardware_concurrency();
    threads = hw > 0 ? static_cast<int>(hw) : 1;
  }
  threads = std::min(threads, total);

  std::vector<RunResult> results(static_cast<std::size_t>(total));

  if (threads <= 1) {
    for (int k = 0; k < total; ++k) {
      results[static_cast<std::size_t>(k)] = run(s, seed_begin + static_cast<std::uint64_t>(k));
      if (progress) progress(k + 1, total);
    }
  } else {
    std::atomic<int> next{0};
    std::atomic<int> done{0};
    std::mutex progress_mutex;
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
      for (;;) {
        const int k = next.fetch_add(1);
        if (k >= total) return;
        try {
          results[static_cast<std::size_t>(k)] =
              run(s, seed_begin + static_cast<std::uint64_t>(k));
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
        const int d = done.fetch_add(1) + 1;
        if (progress) {
          std::lock_guard<std::mutex> lock(progress_mutex);
          progress(d, total);
        }
      }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  // Fold strictly in seed order; the totals cannot depend on scheduling.
  BatchStats stats;
  for (const RunResult& rr : results) stats.absorb(rr);
  return stats;
}

}  // namespace iffca
