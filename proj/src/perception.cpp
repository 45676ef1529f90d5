#include "iffca/perception.hpp"

namespace iffca {

int obstacle_distance(const Grid& g, int row, int col, Direction dir, int r) {
  const int dr = kRowOffset[static_cast<int>(dir)];
  const int dc = kColOffset[static_cast<int>(dir)];
  int run = 0;
  while (run < r && !g.blocked(row, col)) {
    ++run;
    if (g.at(row, col) == Cell::Exit) return r;  // a door opens to the horizon
    row += dr;
    col += dc;
  }
  return run;
}

PerceptionTerm movement_term(const Grid& g, const std::vector<std::uint8_t>& occupancy, int row,
                             int col, Direction dir, int r) {
  const int dr = kRowOffset[static_cast<int>(dir)];
  const int dc = kColOffset[static_cast<int>(dir)];
  int run = 0;
  int occupied = 0;
  while (run < r && !g.blocked(row, col)) {
    occupied += occupancy[static_cast<std::size_t>(g.index(row, col))] != 0;
    ++run;
    if (g.at(row, col) == Cell::Exit) {
      run = r;  // sight escapes through the doorway; outside is empty
      break;
    }
    row += dr;
    col += dc;
  }
  PerceptionTerm t;
  t.r_star = run;
  // occupied <= r_star <= r, so the quotient is already within [0,1].
  t.a = 1.0 - static_cast<double>(occupied + (r - run)) / static_cast<double>(r);
  return t;
}

}  // namespace iffca
