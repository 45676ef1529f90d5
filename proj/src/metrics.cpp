#include "iffca/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace iffca {

void BatchStats::absorb(const RunResult& rr) {
  ++run_count;
  if (rr.censored) {
    ++censored_count;
  } else {
    times.push_back(rr.t_total);
    ++histogram[rr.t_total];
  }
  for (int k = 0; k < 5; ++k) {
    realized[k] += rr.realized[k];
    intended[k] += rr.intended[k];
  }
  movements += rr.movements;
  if (heatmap.size() < rr.cell_visits.size()) heatmap.resize(rr.cell_visits.size(), 0);
  for (std::size_t i = 0; i < rr.cell_visits.size(); ++i) heatmap[i] += rr.cell_visits[i];
}

void BatchStats::merge(const BatchStats& other) {
  run_count += other.run_count;
  censored_count += other.censored_count;
  times.insert(times.end(), other.times.begin(), other.times.end());
  for (const auto& [t, n] : other.histogram) histogram[t] += n;
  for (int k = 0; k < 5; ++k) {
    realized[k] += other.realized[k];
    intended[k] += other.intended[k];
  }
  movements += other.movements;
  if (heatmap.size() < other.heatmap.size()) heatmap.resize(other.heatmap.size(), 0);
  for (std::size_t i = 0; i < other.heatmap.size(); ++i) heatmap[i] += other.heatmap[i];
}

int BatchStats::t_mode() const {
  if (histogram.empty()) return -1;
  int best_t = -1, best_n = 0;
  for (const auto& [t, n] : histogram) {  // ascending t, so ties keep the smallest
    if (n > best_n) {
      best_n = n;
      best_t = t;
    }
  }
  return best_t;
}

double BatchStats::t_mean() const {
  if (times.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (int t : times) sum += t;
  return sum / static_cast<double>(times.size());
}

int mode_of_times(const std::vector<int>& times) {
  if (times.empty()) throw std::invalid_argument("mode_of_times: empty input");
  std::map<int, int> hist;
  for (int t : times) ++hist[t];
  int best_t = times.front(), best_n = 0;
  for (const auto& [t, n] : hist) {
    if (n > best_n) {
      best_n = n;
      best_t = t;
    }
  }
  return best_t;
}

std::array<double, 5> direction_frequencies(const std::array<std::uint64_t, 5>& counts) {
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  std::array<double, 5> f{};
  if (total == 0) return f;
  for (int k = 0; k < 5; ++k) f[k] = static_cast<double>(counts[k]) / static_cast<double>(total);
  return f;
}

}  // namespace iffca
