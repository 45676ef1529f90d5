#include "iffca/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "iffca/perception.hpp"

namespace iffca {

SimState SimState::from_cells(const std::vector<int>& cells, const Grid& g) {
  SimState st;
  st.occupancy.assign(static_cast<std::size_t>(g.cell_count()), 0);
  st.trace = DynamicField(g.cell_count());
  st.peds.reserve(cells.size());
  st.evac_step.assign(cells.size(), -1);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    int cell = cells[i];
    if (g.kind[static_cast<std::size_t>(cell)] != Cell::Free)
      throw ScenarioError("pedestrians: cell " + cell_name(cell, g) + " is not free");
    if (st.occupancy[static_cast<std::size_t>(cell)])
      throw ScenarioError("pedestrians: cell " + cell_name(cell, g) + " listed twice");
    st.occupancy[static_cast<std::size_t>(cell)] = 1;
    st.peds.push_back({static_cast<std::int32_t>(i), cell, Direction::C, true});
  }
  st.active_count = static_cast<int>(cells.size());
  return st;
}

ProbVector transition_probabilities(const Pedestrian& p, const SimState& st, const Grid& g,
                                    const StaticField& sf, const Params& params) {
  ProbVector pv;
  const int row = g.row_of(p.cell), col = g.col_of(p.cell);

  std::array<double, 4> openness{};
  std::array<double, 4> exponent{};
  double shift = -std::numeric_limits<double>::infinity();
  for (int dir = 0; dir < 4; ++dir) {
    const int nr = row + kRowOffset[dir], nc = col + kColOffset[dir];
    if (g.blocked(nr, nc)) continue;
    const int target = g.index(nr, nc);
    openness[dir] = movement_term(g, st.occupancy, nr, nc, static_cast<Direction>(dir), params.r).a;
    if (openness[dir] <= 0.0) continue;
    exponent[dir] = params.k_s * sf.s[static_cast<std::size_t>(target)] +
                    params.k_d * static_cast<double>(st.trace.at(target)) +
                    (static_cast<Direction>(dir) == p.last_move ? params.k_i : 0.0);
    shift = std::max(shift, exponent[dir]);
  }
  if (!std::isfinite(shift)) return pv;  // nothing admissible, norm stays 0

  // Dividing all weights by exp(shift) keeps them in range for any
  // couplings; ratios, and with them every probability, are unchanged.
  for (int dir = 0; dir < 4; ++dir) {
    if (openness[dir] <= 0.0) continue;
    pv.w[dir] = openness[dir] * std::exp(exponent[dir] - shift);
    pv.norm += pv.w[dir];
  }
  return pv;
}

Direction select_target(const ProbVector& pv, SplitMix64& rng) {
  if (pv.norm <= 0.0) return Direction::C;
  const double u = rng.uniform() * pv.norm;
  double acc = 0.0;
  int last = -1;
  for (int dir = 0; dir < 4; ++dir) {
    if (pv.w[dir] <= 0.0) continue;
    last = dir;
    acc += pv.w[dir];
    if (u < acc) return static_cast<Direction>(dir);
  }
  return static_cast<Direction>(last);  // u landed on the float edge of 1
}

Proposal resample_if_occupied(Direction chosen, const ProbVector& pv, const Pedestrian& p,
                              const SimState& st, const Grid& g, SplitMix64& rng) {
  const int row = g.row_of(p.cell), col = g.col_of(p.cell);
  const double p_chosen = pv.probability(chosen);

  // Empty admissible alternatives, in fixed N,E,S,W order. The chosen
  // cell itself is occupied, so it never reappears here.
  std::array<int, 4> avail{};
  int n_avail = 0;
  double z = p_chosen;
  for (int dir = 0; dir < 4; ++dir) {
    if (pv.w[dir] <= 0.0) continue;
    const int nr = row + kRowOffset[dir], nc = col + kColOffset[dir];
    if (st.occupancy[static_cast<std::size_t>(g.index(nr, nc))]) continue;
    avail[n_avail++] = dir;
    z += pv.probability(static_cast<Direction>(dir));
  }
  if (n_avail == 0) return {Direction::C, 1.0};  // boxed in: wait for sure

  // Redistribute: each empty alternative keeps its own weight, staying
  // put inherits the weight of the blocked choice.
  const double u = rng.uniform() * z;
  double acc = 0.0;
  for (int k = 0; k < n_avail; ++k) {
    const double q = pv.probability(static_cast<Direction>(avail[k]));
    acc += q;
    if (u < acc) return {static_cast<Direction>(avail[k]), q / z};
  }
  return {Direction::C, p_chosen / z};
}

namespace {

int target_of(const Pedestrian& p, const Proposal& prop, const Grid& g) {
  const int dir = static_cast<int>(prop.dir);
  return g.index(g.row_of(p.cell) + kRowOffset[dir], g.col_of(p.cell) + kColOffset[dir]);
}

}  // namespace

std::vector<std::uint8_t> resolve_conflicts(const std::vector<Proposal>& proposals,
                                            const SimState& st, const Grid& g,
                                            const StaticField& sf, const Params& params,
                                            std::uint64_t run_seed, int step_index) {
  std::vector<std::uint8_t> approved(proposals.size(), 1);

  // Claims per target cell, grouped in ascending cell order with each
  // group in ascending pedestrian id order, so the draws below do not
  // depend on how the roster happens to be arranged.
  std::map<int, std::vector<std::size_t>> claims;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    if (!st.peds[i].active || proposals[i].dir == Direction::C) continue;
    claims[target_of(st.peds[i], proposals[i], g)].push_back(i);
  }

  for (auto& [cell, group] : claims) {
    if (group.size() < 2) continue;
    std::sort(group.begin(), group.end(),
              [&](std::size_t a, std::size_t b) { return st.peds[a].id < st.peds[b].id; });
    auto rng = substream(run_seed, kStreamConflict, static_cast<std::uint64_t>(step_index),
                         static_cast<std::uint64_t>(cell));

    if (params.mu > 0.0) {
      // Friction scaled by how close the contested cell is to an exit:
      // shoving gets worse near the goal. Without exit coupling the
      // distance is irrelevant and the base value applies.
      double mu_t = params.mu;
      if (params.k_s != 0.0)
        mu_t *= sf.s_max > 0.0 ? sf.s[static_cast<std::size_t>(cell)] / sf.s_max : 1.0;
      if (rng.uniform() < mu_t) {
        for (std::size_t i : group) approved[i] = 0;
        continue;
      }
    }

    std::size_t winner;
    if (params.conflict == ConflictRule::MaxProbability) {
      double best = -1.0;
      std::vector<std::size_t> top;
      for (std::size_t i : group) {
        const double q = proposals[i].selection_probability;
        if (q > best) {
          best = q;
          top.assign(1, i);
        } else if (q == best) {
          top.push_back(i);
        }
      }
      winner = top.size() == 1 ? top[0] : top[rng.below(static_cast<std::uint32_t>(top.size()))];
    } else {
      double total = 0.0;
      for (std::size_t i : group) total += proposals[i].selection_probability;
      if (total <= 0.0) {
        winner = group[rng.below(static_cast<std::uint32_t>(group.size()))];
      } else {
        const double u = rng.uniform() * total;
        double acc = 0.0;
        winner = group.back();
        for (std::size_t i : group) {
          acc += proposals[i].selection_probability;
          if (u < acc) {
            winner = i;
            break;
          }
        }
      }
    }
    for (std::size_t i : group)
      if (i != winner) approved[i] = 0;
  }
  return approved;
}

void step(SimState& st, const Grid& g, const StaticField& sf, const Params& params,
          std::uint64_t run_seed, StepTrace* trace) {
  const int step_index = st.steps_done + 1;
  const std::size_t n = st.peds.size();

  // Phase 1: proposals, all against the same time-t occupancy snapshot.
  std::vector<Proposal> proposals(n);
  for (std::size_t i = 0; i < n; ++i) {
    Pedestrian& p = st.peds[i];
    if (!p.active) continue;
    const ProbVector pv = transition_probabilities(p, st, g, sf, params);
    auto rng = substream(run_seed, kStreamDecision, static_cast<std::uint64_t>(step_index),
                         static_cast<std::uint64_t>(p.id));
    const Direction chosen = select_target(pv, rng);
    if (chosen == Direction::C) {
      proposals[i] = {Direction::C, 1.0};
    } else {
      const int target = target_of(p, {chosen, 0.0}, g);
      if (st.occupancy[static_cast<std::size_t>(target)])
        proposals[i] = resample_if_occupied(chosen, pv, p, st, g, rng);
      else
        proposals[i] = {chosen, pv.probability(chosen)};
    }
    if (trace) ++trace->intended[static_cast<int>(proposals[i].dir)];
  }

  // Phase 2: friction and winner selection per contested cell.
  const std::vector<std::uint8_t> approved =
      resolve_conflicts(proposals, st, g, sf, params, run_seed, step_index);

  // Phase 3: commit. Origins were occupied and targets empty in the
  // snapshot, so the two sets are disjoint and order cannot matter.
  for (std::size_t i = 0; i < n; ++i) {
    Pedestrian& p = st.peds[i];
    if (!p.active) continue;
    if (proposals[i].dir != Direction::C && approved[i]) {
      const int origin = p.cell;
      const int target = target_of(p, proposals[i], g);
      st.occupancy[static_cast<std::size_t>(origin)] = 0;
      st.occupancy[static_cast<std::size_t>(target)] = 1;
      p.cell = target;
      p.last_move = proposals[i].dir;
      st.trace.bump(origin);
      if (trace) {
        ++trace->realized[static_cast<int>(proposals[i].dir)];
        trace->entered_cells.push_back(target);
      }
    } else {
      // Stayed put, by choice or denial; either way inertia is gone.
      p.last_move = Direction::C;
      if (trace) ++trace->realized[static_cast<int>(Direction::C)];
    }
  }

  // Phase 4: pedestrians standing on an exit leave the floor. The final
  // stride off the grid counts one more step.
  for (Pedestrian& p : st.peds) {
    if (!p.active || g.kind[static_cast<std::size_t>(p.cell)] != Cell::Exit) continue;
    p.active = false;
    st.occupancy[static_cast<std::size_t>(p.cell)] = 0;
    st.evac_step[static_cast<std::size_t>(p.id)] = step_index + 1;
    --st.active_count;
  }

  // Phase 5: the trace field relaxes.
  auto field_rng = substream(run_seed, kStreamTrace, static_cast<std::uint64_t>(step_index));
  decay_diffuse(st.trace, g, params.delta, params.alpha, field_rng);

  st.steps_done = step_index;
}

RunResult run(const Scenario& s, std::uint64_t run_seed, const StepObserver& observer) {
  s.params.validate();
  const StaticField sf = build_static_field(s.grid);

  auto placement_rng =
      substream(s.placement_seed ? *s.placement_seed : run_seed, kStreamPlacement);
  const std::vector<int> cells = place_pedestrians(s, placement_rng);
  SimState st = SimState::from_cells(cells, s.grid);

  RunResult rr;
  rr.start_cells = cells;
  rr.cell_visits.assign(static_cast<std::size_t>(s.grid.cell_count()), 0);
  for (int cell : cells) ++rr.cell_visits[static_cast<std::size_t>(cell)];

  while (st.active_count > 0 && st.steps_done < s.max_steps) {
    StepTrace tr;
    step(st, s.grid, sf, s.params, run_seed, &tr);
    for (int k = 0; k < 5; ++k) {
      rr.realized[k] += tr.realized[k];
      rr.intended[k] += tr.intended[k];
      rr.movements += tr.realized[k];
    }
    for (int cell : tr.entered_cells) ++rr.cell_visits[static_cast<std::size_t>(cell)];
    if (observer && !observer(st, s.grid)) break;
  }

  rr.steps = st.steps_done;
  rr.evac_step = st.evac_step;
  rr.censored = st.active_count > 0;
  rr.t_total = 0;
  for (std::int32_t t : rr.evac_step) rr.t_total = std::max(rr.t_total, t < 0 ? 0 : t);
  return rr;
}

}  // namespace iffca
