#pragma once

#include <cstdint>
#include <vector>

#include "iffca/grid.hpp"

namespace iffca {

// Number of consecutive non-wall cells along `dir`, starting at and
// including (row,col), capped at r. The grid edge counts as a wall, but
// an exit is an opening: a ray that reaches one sees through the doorway
// and reports the full range r. 0 when (row,col) itself is a wall.
int obstacle_distance(const Grid& g, int row, int col, Direction dir, int r);

struct PerceptionTerm {
  double a = 0.0;  // openness weight in [0,1]
  int r_star = 0;  // free-run length used to compute it
};

// Openness of the move onto (row,col) judging by the line of sight
// beyond it:
//
//   a = 1 - (occupied + (r - r_star)) / r
//
// where `occupied` counts pedestrians on the visible cells and every
// cell hidden behind the first wall counts as blocked. A move straight
// at a wall (r_star small) or into a packed lane (occupied large) scores
// low; a clear corridor, or one that ends in a doorway, scores 1.
PerceptionTerm movement_term(const Grid& g, const std::vector<std::uint8_t>& occupancy, int row,
                             int col, Direction dir, int r);

}  // namespace iffca
