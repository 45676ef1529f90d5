#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "iffca/grid.hpp"

namespace iffca {

// One-line-per-row picture of the floor: '#' wall, 'E' exit, 'P'
// pedestrian, '.' empty. The inverse of the ASCII scenario format.
std::string ascii_frame(const Grid& g, const std::vector<std::uint8_t>& occupancy);

// Grid-shaped CSV, one row of comma-separated values per grid row.
void write_matrix_csv(std::ostream& os, const Grid& g, const std::vector<double>& values);
void write_matrix_csv(std::ostream& os, const Grid& g, const std::vector<int>& values);
void write_matrix_csv(std::ostream& os, const Grid& g, const std::vector<std::uint64_t>& values);

// "index,t_total" lines, finished runs in seed order.
void write_times_csv(std::ostream& os, const std::vector<int>& times);

// 16-bit binary PGM (P5), values scaled so the largest maps to 65535.
// Viewable almost anywhere and lossless for counters up to 16 bits.
void write_pgm16(std::ostream& os, const Grid& g, const std::vector<std::uint64_t>& values);
void write_pgm16(std::ostream& os, const Grid& g, const std::vector<double>& values);

}  // namespace iffca
