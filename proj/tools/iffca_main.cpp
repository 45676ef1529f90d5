#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "iffca/batch.hpp"
#include "iffca/engine.hpp"
#include "iffca/io.hpp"
#include "iffca/metrics.hpp"
#include "iffca/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace iffca;

namespace {

// Everything on stdout is machine-readable; progress and diagnostics go
// to stderr. Exit codes: 0 fine, 1 finished but no run completed within
// the step budget, 2 invalid input.
constexpr int kExitOk = 0;
constexpr int kExitAllCensored = 1;
constexpr int kExitBadInput = 2;

struct SeedRange {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;  // inclusive
};

SeedRange parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const std::uint64_t one = std::stoull(text);
      return {one, one};
    }
    SeedRange r{std::stoull(text.substr(0, dots)), std::stoull(text.substr(dots + 2))};
    if (r.end < r.begin) throw std::invalid_argument("");
    return r;
  } catch (const std::exception&) {
    throw ScenarioError("seeds: expected N or A..B with A <= B, got '" + text + "'");
  }
}

std::vector<double> parse_list(const std::string& text, const char* field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ScenarioError(std::string(field) + ": expected a comma-separated number list");
    }
  }
  if (out.empty())
    throw ScenarioError(std::string(field) + ": expected a comma-separated number list");
  return out;
}

int thread_count_from(int cli_threads) {
  if (cli_threads > 0) return cli_threads;
  if (const char* env = std::getenv("IFFCA_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring IFFCA_THREADS='" << env << "'\n";
  }
  return 0;  // run_batch picks the hardware concurrency
}

// Shared per-subcommand options that override the scenario file.
struct Overrides {
  std::optional<int> r;
  std::optional<double> k_s, k_d, k_i, mu, delta, alpha;
  std::optional<std::string> conflict;
  std::optional<int> max_steps;
  std::optional<std::uint64_t> placement_seed;

  void apply(Scenario& s) const {
    if (r) s.params.r = *r;
    if (k_s) s.params.k_s = *k_s;
    if (k_d) s.params.k_d = *k_d;
    if (k_i) s.params.k_i = *k_i;
    if (mu) s.params.mu = *mu;
    if (delta) s.params.delta = *delta;
    if (alpha) s.params.alpha = *alpha;
    if (conflict) {
      if (*conflict == "max")
        s.params.conflict = ConflictRule::MaxProbability;
      else if (*conflict == "proportional")
        s.params.conflict = ConflictRule::ProportionalToProbability;
      else
        throw ScenarioError("conflict: unknown rule '" + *conflict + "'");
    }
    if (max_steps) {
      if (*max_steps < 1) throw ScenarioError("max-steps: must be >= 1");
      s.max_steps = *max_steps;
    }
    if (placement_seed) s.placement_seed = *placement_seed;
    s.params.validate();
  }
};

void add_override_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--r", o.r, "Sight radius override");
  cmd->add_option("--kS", o.k_s, "Exit-field coupling override");
  cmd->add_option("--kD", o.k_d, "Trace-field coupling override");
  cmd->add_option("--kI", o.k_i, "Inertia coupling override");
  cmd->add_option("--mu", o.mu, "Friction probability override");
  cmd->add_option("--delta", o.delta, "Trace decay probability override");
  cmd->add_option("--alpha", o.alpha, "Trace diffusion probability override");
  cmd->add_option("--conflict", o.conflict, "Conflict rule: max or proportional");
  cmd->add_option("--max-steps", o.max_steps, "Step budget override");
  cmd->add_option("--placement-seed", o.placement_seed,
                  "Pin random starting cells across run seeds");
}

ProgressFn stderr_progress(const std::string& label) {
  return [label](int done, int total) {
    const int tick = std::max(1, total / 10);
    if (done % tick == 0 || done == total)
      std::cerr << label << ": " << done << "/" << total << " runs\n";
  };
}

ordered_json params_json(const Params& p) {
  return ordered_json{{"r", p.r},         {"kS", p.k_s},     {"kD", p.k_d},
                      {"kI", p.k_i},      {"mu", p.mu},      {"delta", p.delta},
                      {"alpha", p.alpha}, {"conflict", to_string(p.conflict)}};
}

ordered_json frequencies_json(const std::array<double, 5>& f) {
  return ordered_json{{"N", f[0]}, {"E", f[1]}, {"S", f[2]}, {"W", f[3]}, {"C", f[4]}};
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

// ---- run ----------------------------------------------------------------

int cmd_run(const std::string& scenario_path, const std::string& seeds_text, int cli_threads,
            const Overrides& overrides, const std::string& out_dir, const std::string& emit_text,
            bool quiet) {
  Scenario s = load_scenario(scenario_path);
  overrides.apply(s);
  const SeedRange seeds = parse_seed_range(seeds_text);

  std::set<std::string> emit;
  {
    std::stringstream ss(emit_text);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) emit.insert(item);
    const std::set<std::string> known = {"times",   "histogram", "freq",
                                         "heatmap", "fields",    "ascii-frames"};
    for (const auto& e : emit)
      if (!known.count(e)) throw ScenarioError("emit: unknown artifact '" + e + "'");
    if (!emit.empty() && out_dir.empty())
      throw ScenarioError("emit: --out DIR is required when emitting artifacts");
  }

  if (!out_dir.empty()) fs::create_directories(out_dir);

  BatchStats stats;
  if (emit.count("ascii-frames")) {
    // Frame dumps need the per-step states, so these runs go one by one.
    for (std::uint64_t seed = seeds.begin; seed <= seeds.end; ++seed) {
      std::ofstream frames(fs::path(out_dir) / ("frames_" + std::to_string(seed) + ".txt"));
      int frame_no = 0;
      StepObserver observer = [&](const SimState& st, const Grid& g) {
        frames << "# step " << ++frame_no << "\n" << ascii_frame(g, st.occupancy);
        return true;
      };
      stats.absorb(run(s, seed, observer));
    }
  } else {
    stats = run_batch(s, seeds.begin, seeds.end, thread_count_from(cli_threads),
                      quiet ? ProgressFn{} : stderr_progress("run"));
  }

  const auto freq = direction_frequencies(stats.realized);
  ordered_json summary{
      {"scenario", fs::path(scenario_path).filename().string()},
      {"seeds", {seeds.begin, seeds.end}},
      {"runs", stats.run_count},
      {"censored", stats.censored_count},
      {"t_mode", stats.t_mode()},
      {"t_mean", stats.times.empty() ? ordered_json(nullptr) : ordered_json(stats.t_mean())},
      {"movements", stats.movements},
      {"frequencies", frequencies_json(freq)},
      {"params", params_json(s.params)},
  };
  std::cout << summary.dump() << "\n";

  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    if (emit.count("times")) {
      std::ostringstream os;
      write_times_csv(os, stats.times);
      write_file(dir / "times.csv", os.str());
    }
    if (emit.count("histogram")) {
      std::ostringstream os;
      os << "t_total,count\n";
      for (const auto& [t, n] : stats.histogram) os << t << ',' << n << '\n';
      write_file(dir / "histogram.csv", os.str());
    }
    if (emit.count("freq")) {
      std::ostringstream os;
      os << "kind,f_N,f_E,f_S,f_W,f_C,decisions\n";
      os << "realized";
      for (double v : freq) os << ',' << v;
      os << ',' << stats.movements << '\n';
      const auto intended = direction_frequencies(stats.intended);
      os << "intended";
      for (double v : intended) os << ',' << v;
      std::uint64_t decisions = 0;
      for (auto c : stats.intended) decisions += c;
      os << ',' << decisions << '\n';
      write_file(dir / "freq.csv", os.str());
    }
    if (emit.count("heatmap")) {
      std::ostringstream csv;
      write_matrix_csv(csv, s.grid, stats.heatmap);
      write_file(dir / "heatmap.csv", csv.str());
      std::ostringstream pgm;
      write_pgm16(pgm, s.grid, stats.heatmap);
      write_file(dir / "heatmap.pgm", pgm.str());
    }
    if (emit.count("fields")) {
      const StaticField sf = build_static_field(s.grid);
      std::ostringstream sv, dv, pgm;
      write_matrix_csv(sv, s.grid, sf.s);
      write_file(dir / "static_field.csv", sv.str());
      write_matrix_csv(dv, s.grid, sf.dist);
      write_file(dir / "static_dist.csv", dv.str());
      write_pgm16(pgm, s.grid, sf.s);
      write_file(dir / "static_field.pgm", pgm.str());
    }
  }

  return stats.run_count > 0 && stats.censored_count == stats.run_count ? kExitAllCensored
                                                                        : kExitOk;
}

// ---- sweep --------------------------------------------------------------

int cmd_sweep(const std::string& scenario_path, const std::string& seeds_text, int cli_threads,
              const Overrides& overrides, const std::string& ks_list, const std::string& r_list,
              const std::string& out_dir, bool quiet) {
  Scenario base = load_scenario(scenario_path);
  overrides.apply(base);
  const SeedRange seeds = parse_seed_range(seeds_text);
  const std::vector<double> ks_values = parse_list(ks_list, "kS");
  const std::vector<double> r_values = parse_list(r_list, "r");

  std::ostringstream table;
  table << "kS,r,runs,censored,t_mode,t_mean,f_N,f_E,f_S,f_W,f_C,movements\n";
  bool any_finished = false;
  for (double ks : ks_values) {
    for (double r : r_values) {
      Scenario s = base;
      s.params.k_s = ks;
      s.params.r = static_cast<int>(r);
      if (s.params.r < 1 || static_cast<double>(s.params.r) != r)
        throw ScenarioError("r: sight radii must be positive integers");
      std::ostringstream label;
      label << "sweep kS=" << ks << " r=" << s.params.r;
      BatchStats stats = run_batch(s, seeds.begin, seeds.end, thread_count_from(cli_threads),
                                   quiet ? ProgressFn{} : stderr_progress(label.str()));
      const auto freq = direction_frequencies(stats.realized);
      table << ks << ',' << s.params.r << ',' << stats.run_count << ','
            << stats.censored_count << ',' << stats.t_mode() << ',';
      if (stats.times.empty())
        table << "nan";
      else
        table << stats.t_mean();
      for (double v : freq) table << ',' << v;
      table << ',' << stats.movements << '\n';
      any_finished = any_finished || stats.censored_count < stats.run_count;
    }
  }

  std::cout << table.str();
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "sweep.csv", table.str());
  }
  return any_finished ? kExitOk : kExitAllCensored;
}

// ---- render -------------------------------------------------------------

int cmd_render(const std::string& scenario_path, std::uint64_t seed, int step_limit,
               const Overrides& overrides, const std::string& out_dir) {
  Scenario s = load_scenario(scenario_path);
  overrides.apply(s);

  std::ostringstream frames;
  {
    // Frame 0 is the starting position; placement matches what run() does.
    auto rng = substream(s.placement_seed ? *s.placement_seed : seed, kStreamPlacement);
    const SimState st = SimState::from_cells(place_pedestrians(s, rng), s.grid);
    frames << "# step 0\n" << ascii_frame(s.grid, st.occupancy);
  }
  int frame_no = 0;
  StepObserver observer = [&](const SimState& st, const Grid& g) {
    frames << "# step " << ++frame_no << "\n" << ascii_frame(g, st.occupancy);
    return step_limit <= 0 || frame_no < step_limit;
  };
  RunResult rr = run(s, seed, observer);

  if (out_dir.empty()) {
    std::cout << frames.str();
  } else {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / ("frames_" + std::to_string(seed) + ".txt"), frames.str());
    std::cout << ordered_json{{"frames", frame_no + 1},
                              {"t_total", rr.t_total},
                              {"censored", rr.censored}}
                     .dump()
              << "\n";
  }
  return kExitOk;
}

// ---- validate -----------------------------------------------------------

int cmd_validate(const std::string& scenario_path) {
  Scenario s = load_scenario(scenario_path);
  s.params.validate();
  const StaticField sf = build_static_field(s.grid);  // also proves reachability
  ordered_json info{
      {"ok", true},
      {"height", s.grid.height},
      {"width", s.grid.width},
      {"free_cells", s.grid.free_count()},
      {"exits", s.grid.exit_cells().size()},
      {"pedestrians", s.pedestrian_count()},
      {"max_steps", s.max_steps},
      {"field_depth", sf.s_max},
      {"params", params_json(s.params)},
  };
  std::cout << info.dump() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floor-field evacuation simulator"};
  app.require_subcommand(1);

  std::string scenario_path, seeds_text, out_dir, emit_text, ks_list, r_list;
  std::uint64_t render_seed = 0;
  int threads = 0, render_steps = 0;
  bool quiet = false;
  Overrides overrides;

  CLI::App* c_run = app.add_subcommand("run", "Run one scenario over a seed range");
  c_run->add_option("--scenario", scenario_path, "Scenario file (json or ascii map)")
      ->required();
  c_run->add_option("--seeds", seeds_text, "Seed or inclusive range A..B")->required();
  c_run->add_option("--threads", threads, "Worker threads (default: IFFCA_THREADS or all cores)");
  c_run->add_option("--out", out_dir, "Directory for emitted artifacts");
  c_run->add_option("--emit", emit_text,
                    "Comma list of times,histogram,freq,heatmap,fields,ascii-frames");
  c_run->add_flag("--quiet", quiet, "No progress output");
  add_override_flags(c_run, overrides);

  CLI::App* c_sweep = app.add_subcommand("sweep", "Batch over a kS x r parameter product");
  c_sweep->add_option("--scenario", scenario_path, "Scenario file")->required();
  c_sweep->add_option("--seeds", seeds_text, "Seed or inclusive range A..B")->required();
  c_sweep->add_option("--kS", ks_list, "Comma list of exit-field couplings")->required();
  c_sweep->add_option("--r", r_list, "Comma list of sight radii")->required();
  c_sweep->add_option("--threads", threads, "Worker threads");
  c_sweep->add_option("--out", out_dir, "Directory for sweep.csv");
  c_sweep->add_flag("--quiet", quiet, "No progress output");
  {
    // kS/r come from the sweep lists; the rest may still be overridden.
    c_sweep->add_option("--kD", overrides.k_d, "Trace-field coupling override");
    c_sweep->add_option("--kI", overrides.k_i, "Inertia coupling override");
    c_sweep->add_option("--mu", overrides.mu, "Friction probability override");
    c_sweep->add_option("--delta", overrides.delta, "Trace decay probability override");
    c_sweep->add_option("--alpha", overrides.alpha, "Trace diffusion probability override");
    c_sweep->add_option("--conflict", overrides.conflict, "Conflict rule: max or proportional");
    c_sweep->add_option("--max-steps", overrides.max_steps, "Step budget override");
    c_sweep->add_option("--placement-seed", overrides.placement_seed,
                        "Pin random starting cells across run seeds");
  }

  CLI::App* c_render = app.add_subcommand("render", "ASCII frames of a single run");
  c_render->add_option("--scenario", scenario_path, "Scenario file")->required();
  c_render->add_option("--seed", render_seed, "Run seed");
  c_render->add_option("--steps", render_steps, "Stop after this many frames (0 = all)");
  c_render->add_option("--out", out_dir, "Write frames to a file instead of stdout");
  add_override_flags(c_render, overrides);

  CLI::App* c_validate = app.add_subcommand("validate", "Check a scenario file");
  c_validate->add_option("--scenario", scenario_path, "Scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return kExitBadInput;
  }

  try {
    if (c_run->parsed())
      return cmd_run(scenario_path, seeds_text, threads, overrides, out_dir, emit_text, quiet);
    if (c_sweep->parsed())
      return cmd_sweep(scenario_path, seeds_text, threads, overrides, ks_list, r_list, out_dir,
                       quiet);
    if (c_render->parsed())
      return cmd_render(scenario_path, render_seed, render_steps, overrides, out_dir);
    if (c_validate->parsed()) return cmd_validate(scenario_path);
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitOk;
}
