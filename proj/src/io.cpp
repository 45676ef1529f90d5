#include "iffca/io.hpp"

#include <algorithm>
#include <cmath>

namespace iffca {
namespace {

template <typename T>
void matrix_csv(std::ostream& os, const Grid& g, const std::vector<T>& values) {
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      if (col) os << ',';
      os << values[static_cast<std::size_t>(g.index(row, col))];
    }
    os << '\n';
  }
}

template <typename T>
void pgm16(std::ostream& os, const Grid& g, const std::vector<T>& values) {
  double top = 0.0;
  for (T v : values) top = std::max(top, static_cast<double>(v));
  os << "P5\n" << g.width << ' ' << g.height << "\n65535\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = top > 0.0 ? static_cast<double>(values[i]) / top : 0.0;
    const auto level = static_cast<std::uint16_t>(std::lround(x * 65535.0));
    os.put(static_cast<char>(level >> 8));  // big-endian per the format
    os.put(static_cast<char>(level & 0xFF));
  }
}

}  // namespace

std::string ascii_frame(const Grid& g, const std::vector<std::uint8_t>& occupancy) {
  std::string out;
  out.reserve(static_cast<std::size_t>((g.width + 1) * g.height));
  for (int row = 0; row < g.height; ++row) {
    for (int col = 0; col < g.width; ++col) {
      const int cell = g.index(row, col);
      char ch = '.';
      if (g.kind[static_cast<std::size_t>(cell)] == Cell::Obstacle)
        ch = '#';
      else if (occupancy[static_cast<std::size_t>(cell)])
        ch = 'P';
      else if (g.kind[static_cast<std::size_t>(cell)] == Cell::Exit)
        ch = 'E';
      out.push_back(ch);
    }
    out.push_back('\n');
  }
  return out;
}

void write_matrix_csv(std::ostream& os, const Grid& g, const std::vector<double>& values) {
  matrix_csv(os, g, values);
}
void write_matrix_csv(std::ostream& os, const Grid& g, const std::vector<int>& values) {
  matrix_csv(os, g, values);
}
void write_matrix_csv(std::ostream& os, const Grid& g, const std::vector<std::uint64_t>& values) {
  matrix_csv(os, g, values);
}

void write_times_csv(std::ostream& os, const std::vector<int>& times) {
  os << "index,t_total\n";
  for (std::size_t i = 0; i < times.size(); ++i) os << i << ',' << times[i] << '\n';
}

void write_pgm16(std::ostream& os, const Grid& g, const std::vector<std::uint64_t>& values) {
  pgm16(os, g, values);
}
void write_pgm16(std::ostream& os, const Grid& g, const std::vector<double>& values) {
  pgm16(os, g, values);
}

}  // namespace iffca
