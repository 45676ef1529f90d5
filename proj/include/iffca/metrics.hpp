#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "iffca/engine.hpp"

namespace iffca {

// Aggregated results of a batch of runs over consecutive seeds. Folding
// is commutative in the counters and `absorb` is called in seed order,
// so the totals are independent of how the runs were scheduled.
struct BatchStats {
  int run_count = 0;
  int censored_count = 0;
  std::vector<int> times;  // total evacuation steps, finished runs only, seed order
  std::map<int, int> histogram;

  std::array<std::uint64_t, 5> realized{};  // N,E,S,W,C over all steps and runs
  std::array<std::uint64_t, 5> intended{};
  std::uint64_t movements = 0;  // denominator for the frequencies
  std::vector<std::uint64_t> heatmap;

  void absorb(const RunResult& rr);
  void merge(const BatchStats& other);

  // Most frequent total evacuation time; the smallest one on ties.
  // -1 while no run has finished.
  int t_mode() const;
  double t_mean() const;  // NaN while no run has finished
};

// Most frequent value; ties resolved to the smallest. Throws
// std::invalid_argument on an empty list.
int mode_of_times(const std::vector<int>& times);

// realized (or intended) counts normalized by the number of pedestrian
// decisions, N,E,S,W,C order. All zero when nothing was tallied.
std::array<double, 5> direction_frequencies(const std::array<std::uint64_t, 5>& counts);

}  // namespace iffca
