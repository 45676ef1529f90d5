#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace iffca {

enum class Cell : std::uint8_t { Free = 0, Obstacle = 1, Exit = 2 };

// The four von Neumann moves plus C (= stay at the present cell).
// Convention: row 0 is the top of the grid, so N decreases the row and
// E increases the column. The N,E,S,W order is fixed; sampling and all
// reports rely on it.
enum class Direction : std::uint8_t { N = 0, E = 1, S = 2, W = 3, C = 4 };

inline constexpr std::array<int, 4> kRowOffset = {-1, 0, 1, 0};
inline constexpr std::array<int, 4> kColOffset = {0, 1, 0, -1};

inline constexpr const char* to_string(Direction d) {
  constexpr const char* names[5] = {"N", "E", "S", "W", "C"};
  return names[static_cast<int>(d)];
}

// Rectangular lattice of cells. Row-major, origin at the top-left corner.
// Each cell is 0.4 m x 0.4 m; one step corresponds to about 0.3 s of real
// time (reporting only, the dynamics are in steps).
struct Grid {
  static constexpr double kCellSize = 0.4;      // meters
  static constexpr double kStepDuration = 0.3;  // seconds, reporting only

  int width = 0;
  int height = 0;
  std::vector<Cell> kind;

  Grid() = default;
  Grid(int h, int w, Cell fill = Cell::Free)
      : width(w), height(h), kind(static_cast<std::size_t>(w) * h, fill) {}

  int index(int row, int col) const { return row * width + col; }
  int row_of(int cell) const { return cell / width; }
  int col_of(int cell) const { return cell % width; }

  bool in_bounds(int row, int col) const {
    return row >= 0 && row < height && col >= 0 && col < width;
  }
  bool on_boundary(int row, int col) const {
    return row == 0 || col == 0 || row == height - 1 || col == width - 1;
  }

  Cell at(int row, int col) const { return kind[index(row, col)]; }
  Cell& at(int row, int col) { return kind[index(row, col)]; }

  // Out-of-bounds counts as a wall.
  bool blocked(int row, int col) const {
    return !in_bounds(row, col) || at(row, col) == Cell::Obstacle;
  }

  int cell_count() const { return width * height; }

  int free_count() const {
    int n = 0;
    for (Cell c : kind) n += (c == Cell::Free);
    return n;
  }

  std::vector<int> exit_cells() const {
    std::vector<int> out;
    for (int i = 0; i < cell_count(); ++i)
      if (kind[i] == Cell::Exit) out.push_back(i);
    return out;
  }

  std::vector<int> free_cells() const {
    std::vector<int> out;
    for (int i = 0; i < cell_count(); ++i)
      if (kind[i] == Cell::Free) out.push_back(i);
    return out;
  }
};

inline std::string cell_name(int cell, const Grid& g) {
  return "[" + std::to_string(g.row_of(cell)) + "," + std::to_string(g.col_of(cell)) + "]";
}

}  // namespace iffca
