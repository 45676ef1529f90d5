#pragma once

#include <cstdint>
#include <functional>

#include "iffca/metrics.hpp"
#include "iffca/scenario.hpp"

namespace iffca {

// Called after each finished run with (seeds done, seeds total).
using ProgressFn = std::function<void(int, int)>;

// Runs the scenario once per seed in [seed_begin, seed_end] and folds the
// results in seed order. `threads` <= 0 picks the hardware concurrency.
// Every run is keyed only by its own seed, so the outcome is bit-identical
// for any thread count.
BatchStats run_batch(const Scenario& s, std::uint64_t seed_begin, std::uint64_t seed_end,
                     int threads = 0, const ProgressFn& progress = nullptr);

}  // namespace iffca
