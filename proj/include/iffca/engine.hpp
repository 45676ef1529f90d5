#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "iffca/fields.hpp"
#include "iffca/grid.hpp"
#include "iffca/params.hpp"
#include "iffca/scenario.hpp"

namespace iffca {

// Per-direction move weights for one pedestrian, N,E,S,W order. The
// weights are stored exponent-shifted (a common factor exp(-shift) is
// divided out before normalization), which keeps them finite for any
// field couplings; only ratios and the zero/non-zero state of `norm`
// are meaningful across pedestrians.
struct ProbVector {
  std::array<double, 4> w{};  // shifted, unnormalized weights
  double norm = 0.0;          // sum of w; 0 means no admissible move

  double probability(Direction d) const {
    return norm > 0.0 ? w[static_cast<int>(d)] / norm : 0.0;
  }
};

struct Pedestrian {
  std::int32_t id = 0;
  std::int32_t cell = -1;
  Direction last_move = Direction::C;  // C = no inertia
  bool active = true;
};

// What a pedestrian intends to do this step, after the re-draw against
// occupied targets: the move (C = stay) and the probability with which
// exactly this proposal was selected — the friction stage weighs
// competing claims by it.
struct Proposal {
  Direction dir = Direction::C;
  double selection_probability = 1.0;
};

// Mutable simulation state. The grid, static field and parameters live
// outside and are shared read-only by every step.
struct SimState {
  std::vector<Pedestrian> peds;
  std::vector<std::uint8_t> occupancy;  // 1 where an active pedestrian stands
  DynamicField trace;
  int steps_done = 0;
  std::vector<std::int32_t> evac_step;  // by id; -1 while still inside
  int active_count = 0;

  static SimState from_cells(const std::vector<int>& cells, const Grid& g);
};

// Move weights for one pedestrian from the time-t snapshot:
//
//   w(dir) ~ A(dir) * exp(kS*S + kD*D + kI*[dir == last_move])
//
// over the four neighbor cells; wall targets get weight 0, occupied
// targets keep their weight (the re-draw stage handles them). A is the
// line-of-sight openness of the move, S and D the field values at the
// target cell.
ProbVector transition_probabilities(const Pedestrian& p, const SimState& st, const Grid& g,
                                    const StaticField& sf, const Params& params);

// Inverse-CDF draw in N,E,S,W order; C when norm == 0.
Direction select_target(const ProbVector& pv, SplitMix64& rng);

// Re-draw for a pedestrian whose chosen target is occupied: the choice is
// redistributed over the still-empty admissible moves plus staying put,
// each weighted by the original chosen probability (so an impatient
// pedestrian mostly sidesteps, rarely waits). Returns the final proposal
// and the probability that this particular outcome was produced, given
// the occupancy snapshot.
Proposal resample_if_occupied(Direction chosen, const ProbVector& pv, const Pedestrian& p,
                              const SimState& st, const Grid& g, SplitMix64& rng);

// Settles simultaneous claims on the same cell. With probability
// mu_t = mu * S(target)/S_max (plain mu when kS == 0) nobody moves;
// otherwise one claimant wins: the one with the highest selection
// probability (ties broken uniformly) or one drawn proportionally to
// the selection probabilities, per params.conflict. Returns one flag
// per pedestrian: true when its proposal goes through. Stay proposals
// and inactive pedestrians are always approved.
std::vector<std::uint8_t> resolve_conflicts(const std::vector<Proposal>& proposals,
                                            const SimState& st, const Grid& g,
                                            const StaticField& sf, const Params& params,
                                            std::uint64_t run_seed, int step_index);

// Per-step tallies for the reporting layer. intended[dir] counts what
// each pedestrian decided to do this step — the settled proposal, waits
// included, before friction could deny it; realized[dir] counts what
// actually happened (a denied move lands on C).
struct StepTrace {
  std::array<std::uint32_t, 5> realized{};
  std::array<std::uint32_t, 5> intended{};
  std::vector<int> entered_cells;  // targets of approved moves
};

// One synchronous update: every active pedestrian proposes from the same
// time-t snapshot, conflicts are settled, approved moves commit at once,
// each mover leaves a trace unit at its origin, pedestrians standing on
// an exit leave the floor, and the trace field relaxes. steps_done
// advances by one.
void step(SimState& st, const Grid& g, const StaticField& sf, const Params& params,
          std::uint64_t run_seed, StepTrace* trace = nullptr);

struct RunResult {
  std::vector<std::int32_t> evac_step;  // by id; -1 = still inside at cut-off
  int t_total = 0;                      // largest evacuation step; 0 with no pedestrians
  bool censored = false;                // true when max_steps ran out first
  int steps = 0;                        // update steps actually executed
  std::array<std::uint64_t, 5> realized{};
  std::array<std::uint64_t, 5> intended{};
  std::uint64_t movements = 0;               // moves + stays of active pedestrians
  std::vector<std::uint64_t> cell_visits;    // starts + entries per cell
  std::vector<int> start_cells;              // by id
};

// Called after every step with the state and the grid; return false to
// stop the run early (used by frame dumps).
using StepObserver = std::function<bool(const SimState&, const Grid&)>;

// Full run: place pedestrians (placement_seed if set, else the run seed),
// then step until everyone is out or max_steps is spent. The evacuation
// step recorded for a pedestrian reaching an exit at step t is t + 1,
// counting the final stride off the floor, so a pedestrian d cells from
// the exit needs at least d + 1.
RunResult run(const Scenario& s, std::uint64_t run_seed, const StepObserver& observer = nullptr);

}  // namespace iffca
