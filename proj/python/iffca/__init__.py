"""Floor-field evacuation simulator.

Thin wrapper over the C++ core; see the project README for the model and
the scenario formats.
"""

from ._core import (
    BatchStats,
    CellKind,
    ConflictRule,
    Direction,
    Grid,
    Params,
    RunResult,
    Scenario,
    ScenarioError,
    StaticField,
    build_static_field,
    direction_frequencies,
    load_scenario,
    mode_of_times,
    parse_scenario,
    run,
    run_batch,
    run_frames,
    serialize_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "BatchStats",
    "CellKind",
    "ConflictRule",
    "Direction",
    "Grid",
    "Params",
    "RunResult",
    "Scenario",
    "ScenarioError",
    "StaticField",
    "build_static_field",
    "direction_frequencies",
    "load_scenario",
    "mode_of_times",
    "parse_scenario",
    "run",
    "run_batch",
    "run_frames",
    "serialize_scenario",
    "__version__",
]
