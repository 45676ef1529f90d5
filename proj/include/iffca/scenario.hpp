#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "iffca/grid.hpp"
#include "iffca/params.hpp"
#include "iffca/rng.hpp"

namespace iffca {

// Raised for anything wrong with a scenario description: JSON syntax,
// malformed maps, out-of-range coordinates, impossible placements.
// The message names the offending field or map position.
struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

// Where the pedestrians start: either an explicit list of cells (id order
// = list order) or `count` cells drawn uniformly without replacement.
struct Placement {
  bool random = false;
  int count = 0;            // random placements only
  std::vector<int> cells;   // explicit placements only, grid indices
};

// A complete, validated simulation setup: geometry, starting crowd,
// model parameters, and the step budget.
struct Scenario {
  Grid grid;
  Placement placement;
  std::optional<std::uint64_t> placement_seed;  // pins starts across run seeds
  Params params;
  int max_steps = 100000;
  std::string description;
  bool from_ascii = false;  // retained so serialization keeps the input style

  int pedestrian_count() const {
    return placement.random ? placement.count : static_cast<int>(placement.cells.size());
  }
};

// Parses either format: a JSON object (room dimensions describe the
// walkable interior; a one-cell wall ring is added around it) or a plain
// ASCII map (taken verbatim, '#' wall, 'E' exit, 'P' pedestrian, '.' free).
// A JSON object may also carry the map under an "ascii" key.
Scenario parse_scenario(std::string_view text);

// Reads the file and parses it. Propagates ScenarioError; file access
// problems are reported as ScenarioError too.
Scenario load_scenario(const std::string& path);

// Canonical JSON text; parse_scenario(serialize_scenario(s)) reproduces s.
std::string serialize_scenario(const Scenario& s);

// Resolves the placement to concrete cells, one per pedestrian, in id
// order. Explicit placements are returned as listed; random placements
// are drawn without replacement from the Free cells using `rng`.
std::vector<int> place_pedestrians(const Scenario& s, SplitMix64& rng);

}  // namespace iffca
