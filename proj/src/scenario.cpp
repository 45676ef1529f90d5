#include "iffca/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace iffca {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) { throw ScenarioError(msg); }

void check_known_keys(const json& j, const std::set<std::string>& allowed,
                      const std::string& where) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      fail(where + ": unknown field '" + item.key() + "'");
}

int get_int(const json& j, const std::string& field, int lo, int hi) {
  if (!j.is_number_integer())
    fail(field + ": expected an integer");
  long long v = j.get<long long>();
  if (v < lo || v > hi)
    fail(field + ": " + std::to_string(v) + " is out of range [" +
         std::to_string(lo) + "," + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

double get_num(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field + ": expected a number");
  return j.get<double>();
}

// [row,col] pair in full-grid coordinates.
std::pair<int, int> get_coord(const json& j, const std::string& field, const Grid& g) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    fail(field + ": expected a [row,col] integer pair");
  int r = j[0].get<int>(), c = j[1].get<int>();
  if (!g.in_bounds(r, c))
    fail(field + ": cell [" + std::to_string(r) + "," + std::to_string(c) +
         "] is outside the " + std::to_string(g.height) + "x" +
         std::to_string(g.width) + " grid");
  return {r, c};
}

Params parse_params(const json& j) {
  Params p;
  if (!j.is_object()) fail("params: expected an object");
  check_known_keys(j, {"r", "kS", "kD", "kI", "mu", "delta", "alpha", "conflict"}, "params");
  if (j.contains("r")) p.r = get_int(j["r"], "params.r", 1, 1 << 20);
  if (j.contains("kS")) p.k_s = get_num(j["kS"], "params.kS");
  if (j.contains("kD")) p.k_d = get_num(j["kD"], "params.kD");
  if (j.contains("kI")) p.k_i = get_num(j["kI"], "params.kI");
  if (j.contains("mu")) p.mu = get_num(j["mu"], "params.mu");
  if (j.contains("delta")) p.delta = get_num(j["delta"], "params.delta");
  if (j.contains("alpha")) p.alpha = get_num(j["alpha"], "params.alpha");
  if (j.contains("conflict")) {
    if (!j["conflict"].is_string()) fail("params.conflict: expected a string");
    std::string v = j["conflict"].get<std::string>();
    if (v == "max")
      p.conflict = ConflictRule::MaxProbability;
    else if (v == "proportional")
      p.conflict = ConflictRule::ProportionalToProbability;
    else
      fail("params.conflict: unknown rule '" + v + "' (use \"max\" or \"proportional\")");
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  return p;
}

void require_exits(const Scenario& s) {
  if (s.grid.exit_cells().empty()) fail("exits: none defined");
}

// Shared checks for explicitly listed pedestrians.
void check_pedestrian_cell(const Grid& g, int row, int col, std::set<int>& seen) {
  std::string name = "[" + std::to_string(row) + "," + std::to_string(col) + "]";
  if (g.at(row, col) == Cell::Obstacle) fail("pedestrians: cell " + name + " is a wall");
  if (g.at(row, col) == Cell::Exit) fail("pedestrians: cell " + name + " is an exit");
  if (!seen.insert(g.index(row, col)).second) fail("pedestrians: cell " + name + " listed twice");
}

Scenario parse_ascii_lines(const std::vector<std::string>& lines_in) {
  std::vector<std::string> lines;
  for (std::string line : lines_in) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) fail("map: empty");

  const std::size_t width = lines.front().size();
  if (width == 0) fail("map: line 1 is empty");
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (lines[i].size() != width)
      fail("map: line " + std::to_string(i + 1) + " has length " +
           std::to_string(lines[i].size()) + ", expected " + std::to_string(width));

  Scenario s;
  s.from_ascii = true;
  s.grid = Grid(static_cast<int>(lines.size()), static_cast<int>(width));
  for (int row = 0; row < s.grid.height; ++row) {
    for (int col = 0; col < s.grid.width; ++col) {
      char ch = lines[row][static_cast<std::size_t>(col)];
      switch (ch) {
        case '#': s.grid.at(row, col) = Cell::Obstacle; break;
        case '.': s.grid.at(row, col) = Cell::Free; break;
        case 'E':
          if (!s.grid.on_boundary(row, col))
            fail("map: line " + std::to_string(row + 1) + ", column " +
                 std::to_string(col + 1) + ": exit must sit on the outer boundary");
          s.grid.at(row, col) = Cell::Exit;
          break;
        case 'P':
          s.grid.at(row, col) = Cell::Free;
          s.placement.cells.push_back(s.grid.index(row, col));
          break;
        default:
          fail("map: line " + std::to_string(row + 1) + ", column " +
               std::to_string(col + 1) + ": unexpected character '" + std::string(1, ch) + "'");
      }
    }
  }
  require_exits(s);
  return s;
}

Scenario parse_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("json: ") + e.what());
  }
  if (!j.is_object()) fail("json: top level must be an object");

  Scenario s;

  if (j.contains("ascii")) {
    check_known_keys(j, {"ascii", "params", "max_steps", "placement_seed", "description"},
                     "scenario");
    if (!j["ascii"].is_array()) fail("ascii: expected an array of strings");
    std::vector<std::string> lines;
    for (const auto& v : j["ascii"]) {
      if (!v.is_string()) fail("ascii: expected an array of strings");
      lines.push_back(v.get<std::string>());
    }
    s = parse_ascii_lines(lines);
  } else {
    check_known_keys(j,
                     {"width", "height", "obstacles", "exits", "pedestrians", "placement_seed",
                      "params", "max_steps", "description"},
                     "scenario");
    if (!j.contains("width") || !j.contains("height"))
      fail("scenario: width and height are required");
    int w = get_int(j["width"], "width", 1, 4096);
    int h = get_int(j["height"], "height", 1, 4096);

    // width x height describe the walkable interior; a one-cell wall ring
    // is added around it, so the full grid is (h+2) x (w+2) and all
    // coordinates below address the full grid.
    s.grid = Grid(h + 2, w + 2);
    for (int row = 0; row < s.grid.height; ++row)
      for (int col = 0; col < s.grid.width; ++col)
        if (s.grid.on_boundary(row, col)) s.grid.at(row, col) = Cell::Obstacle;

    if (j.contains("obstacles")) {
      if (!j["obstacles"].is_array()) fail("obstacles: expected an array");
      for (const auto& v : j["obstacles"]) {
        auto [row, col] = get_coord(v, "obstacles", s.grid);
        s.grid.at(row, col) = Cell::Obstacle;
      }
    }

    if (!j.contains("exits")) fail("exits: required");
    if (!j["exits"].is_array()) fail("exits: expected an array");
    for (const auto& v : j["exits"]) {
      auto [row, col] = get_coord(v, "exits", s.grid);
      if (!s.grid.on_boundary(row, col))
        fail("exits: cell [" + std::to_string(row) + "," + std::to_string(col) +
             "] is not on the boundary ring");
      s.grid.at(row, col) = Cell::Exit;
    }

    if (j.contains("pedestrians")) {
      const auto& peds = j["pedestrians"];
      if (peds.is_object()) {
        check_known_keys(peds, {"random"}, "pedestrians");
        if (!peds.contains("random")) fail("pedestrians: expected coordinates or {\"random\": N}");
        s.placement.random = true;
        s.placement.count = get_int(peds["random"], "pedestrians.random", 0, 1 << 24);
      } else if (peds.is_array()) {
        std::set<int> seen;
        for (const auto& v : peds) {
          auto [row, col] = get_coord(v, "pedestrians", s.grid);
          check_pedestrian_cell(s.grid, row, col, seen);
          s.placement.cells.push_back(s.grid.index(row, col));
        }
      } else {
        fail("pedestrians: expected coordinates or {\"random\": N}");
      }
    }
    require_exits(s);
  }

  if (j.contains("description")) {
    if (!j["description"].is_string()) fail("description: expected a string");
    s.description = j["description"].get<std::string>();
  }
  if (j.contains("placement_seed")) {
    const auto& v = j["placement_seed"];
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
      fail("placement_seed: expected a non-negative integer");
    s.placement_seed = v.get<std::uint64_t>();
  }
  if (j.contains("params")) s.params = parse_params(j["params"]);
  if (j.contains("max_steps")) s.max_steps = get_int(j["max_steps"], "max_steps", 1, 1 << 30);

  if (s.placement.random && s.placement.count > s.grid.free_count())
    fail("pedestrians.random: " + std::to_string(s.placement.count) + " exceeds the " +
         std::to_string(s.grid.free_count()) + " free cells");
  return s;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  std::size_t at = text.find_first_not_of(" \t\r\n");
  if (at == std::string_view::npos) fail("scenario: empty input");
  if (text[at] == '{') return parse_json_text(text);

  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return parse_ascii_lines(lines);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
  ordered_json j;
  if (!s.description.empty()) j["description"] = s.description;

  if (s.from_ascii) {
    std::vector<std::string> lines(static_cast<std::size_t>(s.grid.height),
                                   std::string(static_cast<std::size_t>(s.grid.width), '.'));
    for (int row = 0; row < s.grid.height; ++row)
      for (int col = 0; col < s.grid.width; ++col) {
        char& ch = lines[row][static_cast<std::size_t>(col)];
        switch (s.grid.at(row, col)) {
          case Cell::Obstacle: ch = '#'; break;
          case Cell::Exit: ch = 'E'; break;
          case Cell::Free: ch = '.'; break;
        }
      }
    for (int cell : s.placement.cells)
      lines[s.grid.row_of(cell)][static_cast<std::size_t>(s.grid.col_of(cell))] = 'P';
    j["ascii"] = lines;
  } else {
    j["width"] = s.grid.width - 2;
    j["height"] = s.grid.height - 2;
    ordered_json obstacles = ordered_json::array();
    ordered_json exits = ordered_json::array();
    for (int cell = 0; cell < s.grid.cell_count(); ++cell) {
      int row = s.grid.row_of(cell), col = s.grid.col_of(cell);
      if (s.grid.kind[cell] == Cell::Exit)
        exits.push_back({row, col});
      else if (s.grid.kind[cell] == Cell::Obstacle && !s.grid.on_boundary(row, col))
        obstacles.push_back({row, col});
    }
    if (!obstacles.empty()) j["obstacles"] = obstacles;
    j["exits"] = exits;
    if (s.placement.random) {
      j["pedestrians"] = ordered_json{{"random", s.placement.count}};
    } else if (!s.placement.cells.empty()) {
      ordered_json peds = ordered_json::array();
      for (int cell : s.placement.cells)
        peds.push_back({s.grid.row_of(cell), s.grid.col_of(cell)});
      j["pedestrians"] = peds;
    }
  }

  if (s.placement_seed) j["placement_seed"] = *s.placement_seed;
  j["params"] = ordered_json{{"r", s.params.r},         {"kS", s.params.k_s},
                             {"kD", s.params.k_d},      {"kI", s.params.k_i},
                             {"mu", s.params.mu},       {"delta", s.params.delta},
                             {"alpha", s.params.alpha}, {"conflict", to_string(s.params.conflict)}};
  j["max_steps"] = s.max_steps;
  return j.dump(2) + "\n";
}

std::vector<int> place_pedestrians(const Scenario& s, SplitMix64& rng) {
  if (!s.placement.random) return s.placement.cells;

  // Partial Fisher-Yates over the free cells: draw `count` without
  // replacement, id order = draw order.
  std::vector<int> pool = s.grid.free_cells();
  if (s.placement.count > static_cast<int>(pool.size()))
    fail("pedestrians.random: " + std::to_string(s.placement.count) + " exceeds the " +
         std::to_string(pool.size()) + " free cells");
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(s.placement.count));
  for (int i = 0; i < s.placement.count; ++i) {
    std::uint32_t pick = i + rng.below(static_cast<std::uint32_t>(pool.size() - i));
    std::swap(pool[i], pool[pick]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace iffca
