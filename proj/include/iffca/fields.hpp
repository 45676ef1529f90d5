#pragma once

#include <cstdint>
#include <vector>

#include "iffca/grid.hpp"
#include "iffca/rng.hpp"

namespace iffca {

// Static floor field: attraction toward the exits. Built once per grid.
// `dist` is the von Neumann shortest-path distance to the nearest exit in
// moves (-1 on walls) and bounds the fastest possible evacuation; `s` is
// the field value the walkers actually read, largest on the exits, so
// that moving toward an exit always climbs the field.
struct StaticField {
  std::vector<int> dist;
  std::vector<double> s;
  double s_max = 0.0;

  double at(int cell) const { return s[static_cast<std::size_t>(cell)]; }
};

// `dist` comes from a breadth-first search from all exit cells at once,
// unit cost per von Neumann move, obstacles impassable. `s` is d_max - d
// where d is the walking distance, sized up the way a person would: exact
// straight-line distance wherever some exit is in view (a sight line is
// blocked only by passing through a wall's interior, not by grazing its
// corner), and the grid solution of |grad d| = 1 continued outward from
// the sighted cells around corners and behind obstacles. Throws
// ScenarioError naming the first unreachable free cell (row-major), since
// a pedestrian placed there could never leave.
StaticField build_static_field(const Grid& g);

// Dynamic floor field: an integer trace counter per cell, bumped at the
// origin cell of every move and relaxed once per step.
struct DynamicField {
  std::vector<std::int32_t> d;

  explicit DynamicField(int cells = 0) : d(static_cast<std::size_t>(cells), 0) {}

  std::int32_t at(int cell) const { return d[static_cast<std::size_t>(cell)]; }
  void bump(int cell) { ++d[static_cast<std::size_t>(cell)]; }
  void clear() { std::fill(d.begin(), d.end(), 0); }
};

// One relaxation sweep. Cells are visited in row-major order and each
// unit of trace is treated independently: with probability alpha it hops
// to a uniformly chosen von Neumann neighbor (staying put if that
// neighbor is a wall or off the grid), then with probability delta it
// evaporates. The visiting order is fixed so replays are bit-identical.
void decay_diffuse(DynamicField& f, const Grid& g, double delta, double alpha, SplitMix64& rng);

}  // namespace iffca
