#include "iffca/fields.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <limits>
#include <queue>

#include "iffca/scenario.hpp"

namespace iffca {

namespace {

// Does the straight line between two cell centers stay clear of walls?
// A wall blocks the view only when the segment passes through the open
// interior of its unit square; grazing a corner or sliding along a face
// lets the eye through. Working in half-cell units makes every quantity
// an integer, so the test is exact: a separating-axis check against the
// square's two slab axes and the segment's normal.
bool sight_clear(const Grid& g, int from, int to) {
  const std::int64_t pr = 2 * g.row_of(from), pc = 2 * g.col_of(from);
  const std::int64_t qr = 2 * g.row_of(to), qc = 2 * g.col_of(to);
  const int row_lo = std::min(g.row_of(from), g.row_of(to));
  const int row_hi = std::max(g.row_of(from), g.row_of(to));
  const int col_lo = std::min(g.col_of(from), g.col_of(to));
  const int col_hi = std::max(g.col_of(from), g.col_of(to));

  for (int row = row_lo; row <= row_hi; ++row) {
    for (int col = col_lo; col <= col_hi; ++col) {
      if (g.at(row, col) != Cell::Obstacle) continue;
      // Segment endpoints relative to this square's center; the open
      // square spans (-1, 1) on both axes.
      const std::int64_t ar = pr - 2 * row, ac = pc - 2 * col;
      const std::int64_t br = qr - 2 * row, bc = qc - 2 * col;
      if (std::max(ar, br) <= -1 || std::min(ar, br) >= 1) continue;
      if (std::max(ac, bc) <= -1 || std::min(ac, bc) >= 1) continue;
      const std::int64_t dr = br - ar, dc = bc - ac;
      const std::int64_t offset = dr * ac - dc * ar;
      const std::int64_t reach = std::abs(dr) + std::abs(dc);
      if (std::abs(offset) >= reach) continue;
      return false;
    }
  }
  return true;
}

// Walking distance to the nearest exit, the way a person would size it
// up: straight-line distance wherever some exit is in view, and the
// first-order upwind solution of |grad T| = 1 (advanced Dijkstra-style
// from the sighted cells) around corners and behind obstacles. In an
// open room this is exact; walls bend the level sets around themselves.
// Contrast with `dist`, which counts actual von Neumann moves.
std::vector<double> walking_distance(const Grid& g) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> t(static_cast<std::size_t>(g.cell_count()), inf);
  std::vector<char> sighted(static_cast<std::size_t>(g.cell_count()), 0);

  std::vector<int> exits;
  for (int cell = 0; cell < g.cell_count(); ++cell)
    if (g.kind[cell] == Cell::Exit) exits.push_back(cell);

  for (int cell = 0; cell < g.cell_count(); ++cell) {
    if (g.kind[cell] == Cell::Obstacle) continue;
    double best = inf;
    for (int e : exits) {
      if (cell != e && !sight_clear(g, cell, e)) continue;
      const double dr = g.row_of(cell) - g.row_of(e);
      const double dc = g.col_of(cell) - g.col_of(e);
      best = std::min(best, std::sqrt(dr * dr + dc * dc));
    }
    if (best < inf) {
      t[static_cast<std::size_t>(cell)] = best;
      sighted[static_cast<std::size_t>(cell)] = 1;
    }
  }

  auto value = [&](int row, int col) {
    if (!g.in_bounds(row, col) || g.at(row, col) == Cell::Obstacle) return inf;
    return t[static_cast<std::size_t>(g.index(row, col))];
  };
  auto solve = [&](int row, int col) {
    double a = std::min(value(row, col - 1), value(row, col + 1));
    double b = std::min(value(row - 1, col), value(row + 1, col));
    if (a > b) std::swap(a, b);
    if (a == inf) return inf;
    if (b == inf || b - a >= 1.0) return a + 1.0;
    const double diff = a - b;
    return (a + b + std::sqrt(2.0 - diff * diff)) / 2.0;
  };

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (int cell = 0; cell < g.cell_count(); ++cell)
    if (sighted[static_cast<std::size_t>(cell)])
      heap.emplace(t[static_cast<std::size_t>(cell)], cell);

  while (!heap.empty()) {
    const auto [d, cell] = heap.top();
    heap.pop();
    if (d > t[static_cast<std::size_t>(cell)]) continue;  // stale entry
    const int row = g.row_of(cell), col = g.col_of(cell);
    for (int dir = 0; dir < 4; ++dir) {
      const int nr = row + kRowOffset[dir], nc = col + kColOffset[dir];
      if (!g.in_bounds(nr, nc) || g.at(nr, nc) != Cell::Free) continue;
      const int n = g.index(nr, nc);
      if (sighted[static_cast<std::size_t>(n)]) continue;
      const double nd = solve(nr, nc);
      auto& slot = t[static_cast<std::size_t>(n)];
      if (nd < slot) {
        slot = nd;
        heap.emplace(nd, n);
      }
    }
  }
  return t;
}

}  // namespace

StaticField build_static_field(const Grid& g) {
  StaticField f;
  f.dist.assign(static_cast<std::size_t>(g.cell_count()), -1);

  std::deque<int> frontier;
  for (int cell = 0; cell < g.cell_count(); ++cell) {
    if (g.kind[cell] == Cell::Exit) {
      f.dist[cell] = 0;
      frontier.push_back(cell);
    }
  }

  while (!frontier.empty()) {
    int cell = frontier.front();
    frontier.pop_front();
    int row = g.row_of(cell), col = g.col_of(cell);
    for (int dir = 0; dir < 4; ++dir) {
      int nr = row + kRowOffset[dir], nc = col + kColOffset[dir];
      if (!g.in_bounds(nr, nc) || g.at(nr, nc) != Cell::Free) continue;
      int n = g.index(nr, nc);
      if (f.dist[n] >= 0) continue;
      f.dist[n] = f.dist[cell] + 1;
      frontier.push_back(n);
    }
  }

  for (int cell = 0; cell < g.cell_count(); ++cell)
    if (g.kind[cell] == Cell::Free && f.dist[cell] < 0)
      throw ScenarioError("grid: free cell " + cell_name(cell, g) + " cannot reach any exit");

  const std::vector<double> delta = walking_distance(g);
  double d_max = 0.0;
  for (int cell = 0; cell < g.cell_count(); ++cell)
    if (f.dist[cell] >= 0) d_max = std::max(d_max, delta[static_cast<std::size_t>(cell)]);

  f.s.assign(static_cast<std::size_t>(g.cell_count()), 0.0);
  f.s_max = d_max;
  for (int cell = 0; cell < g.cell_count(); ++cell)
    if (f.dist[cell] >= 0) f.s[cell] = d_max - delta[static_cast<std::size_t>(cell)];
  return f;
}

void decay_diffuse(DynamicField& f, const Grid& g, double delta, double alpha, SplitMix64& rng) {
  if (delta <= 0.0 && alpha <= 0.0) return;

  std::vector<std::int32_t> next(f.d.size(), 0);
  for (int cell = 0; cell < g.cell_count(); ++cell) {
    std::int32_t units = f.d[static_cast<std::size_t>(cell)];
    if (units <= 0) continue;
    int row = g.row_of(cell), col = g.col_of(cell);
    for (std::int32_t u = 0; u < units; ++u) {
      int dest = cell;
      if (alpha > 0.0 && rng.uniform() < alpha) {
        int dir = static_cast<int>(rng.below(4));
        int nr = row + kRowOffset[dir], nc = col + kColOffset[dir];
        if (!g.blocked(nr, nc)) dest = g.index(nr, nc);
      }
      if (delta > 0.0 && rng.uniform() < delta) continue;
      ++next[static_cast<std::size_t>(dest)];
    }
  }
  f.d.swap(next);
}

}  // namespace iffca
