#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "iffca/batch.hpp"
#include "iffca/engine.hpp"
#include "iffca/io.hpp"
#include "iffca/metrics.hpp"
#include "iffca/scenario.hpp"

namespace py = pybind11;
using namespace iffca;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Floor-field evacuation simulator core";

  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

  py::enum_<Direction>(m, "Direction")
      .value("N", Direction::N)
      .value("E", Direction::E)
      .value("S", Direction::S)
      .value("W", Direction::W)
      .value("C", Direction::C);

  py::enum_<Cell>(m, "CellKind")
      .value("FREE", Cell::Free)
      .value("OBSTACLE", Cell::Obstacle)
      .value("EXIT", Cell::Exit);

  py::enum_<ConflictRule>(m, "ConflictRule")
      .value("MAX_PROBABILITY", ConflictRule::MaxProbability)
      .value("PROPORTIONAL", ConflictRule::ProportionalToProbability);

  py::class_<Grid>(m, "Grid")
      .def_readonly("width", &Grid::width)
      .def_readonly("height", &Grid::height)
      .def("cell", [](const Grid& g, int row, int col) { return g.at(row, col); },
           py::arg("row"), py::arg("col"))
      .def("free_count", &Grid::free_count)
      .def("exit_cells", &Grid::exit_cells)
      .def("index", &Grid::index, py::arg("row"), py::arg("col"))
      .def("row_of", &Grid::row_of, py::arg("cell"))
      .def("col_of", &Grid::col_of, py::arg("cell"));

  py::class_<Params>(m, "Params")
      .def(py::init<>())
      .def_readwrite("r", &Params::r)
      .def_readwrite("kS", &Params::k_s)
      .def_readwrite("kD", &Params::k_d)
      .def_readwrite("kI", &Params::k_i)
      .def_readwrite("mu", &Params::mu)
      .def_readwrite("delta", &Params::delta)
      .def_readwrite("alpha", &Params::alpha)
      .def_readwrite("conflict", &Params::conflict)
      .def("validate", &Params::validate);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("grid", &Scenario::grid)
      .def_readwrite("params", &Scenario::params)
      .def_readwrite("max_steps", &Scenario::max_steps)
      .def_readwrite("placement_seed", &Scenario::placement_seed)
      .def_readonly("description", &Scenario::description)
      .def_property_readonly("pedestrian_count", &Scenario::pedestrian_count)
      .def("__repr__", [](const Scenario& s) {
        return "<Scenario " + std::to_string(s.grid.height) + "x" +
               std::to_string(s.grid.width) + ", " + std::to_string(s.pedestrian_count()) +
               " pedestrians>";
      });

  py::class_<StaticField>(m, "StaticField")
      .def_readonly("dist", &StaticField::dist)
      .def_readonly("s", &StaticField::s)
      .def_readonly("s_max", &StaticField::s_max);

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("evac_step", &RunResult::evac_step)
      .def_readonly("t_total", &RunResult::t_total)
      .def_readonly("censored", &RunResult::censored)
      .def_readonly("steps", &RunResult::steps)
      .def_readonly("realized", &RunResult::realized)
      .def_readonly("intended", &RunResult::intended)
      .def_readonly("movements", &RunResult::movements)
      .def_readonly("cell_visits", &RunResult::cell_visits)
      .def_readonly("start_cells", &RunResult::start_cells);

  py::class_<BatchStats>(m, "BatchStats")
      .def_readonly("run_count", &BatchStats::run_count)
      .def_readonly("censored_count", &BatchStats::censored_count)
      .def_readonly("times", &BatchStats::times)
      .def_readonly("realized", &BatchStats::realized)
      .def_readonly("intended", &BatchStats::intended)
      .def_readonly("movements", &BatchStats::movements)
      .def_readonly("heatmap", &BatchStats::heatmap)
      .def("t_mode", &BatchStats::t_mode)
      .def("t_mean", &BatchStats::t_mean);

  m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text); },
        py::arg("text"), "Parse a scenario from JSON or ASCII-map text");
  m.def("load_scenario", &load_scenario, py::arg("path"), "Load and parse a scenario file");
  m.def("serialize_scenario", &serialize_scenario, py::arg("scenario"));
  m.def("build_static_field", &build_static_field, py::arg("grid"));
  m.def("mode_of_times", &mode_of_times, py::arg("times"));
  m.def("direction_frequencies", &direction_frequencies, py::arg("counts"),
        "Normalize N,E,S,W,C counters to frequencies");

  m.def("run", [](const Scenario& s, std::uint64_t seed) { return run(s, seed); },
        py::arg("scenario"), py::arg("seed"), py::call_guard<py::gil_scoped_release>(),
        "One full evacuation run");
  m.def("run_batch",
        [](const Scenario& s, std::uint64_t seed_begin, std::uint64_t seed_end, int threads) {
          return run_batch(s, seed_begin, seed_end, threads);
        },
        py::arg("scenario"), py::arg("seed_begin"), py::arg("seed_end"), py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>(),
        "Run every seed in [seed_begin, seed_end] and fold the statistics");
  m.def("run_frames",
        [](const Scenario& s, std::uint64_t seed, int limit) {
          std::vector<std::string> frames;
          {
            auto rng = substream(s.placement_seed ? *s.placement_seed : seed, kStreamPlacement);
            const SimState st = SimState::from_cells(place_pedestrians(s, rng), s.grid);
            frames.push_back(ascii_frame(s.grid, st.occupancy));
          }
          StepObserver observer = [&](const SimState& st, const Grid& g) {
            frames.push_back(ascii_frame(g, st.occupancy));
            return limit <= 0 || static_cast<int>(frames.size()) <= limit;
          };
          run(s, seed, observer);
          return frames;
        },
        py::arg("scenario"), py::arg("seed"), py::arg("limit") = 0,
        "ASCII frames of one run, starting position first");
}
