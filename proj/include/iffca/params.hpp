#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace iffca {

// How simultaneous claims on one target cell are settled after the
// friction draw lets the conflict through.
enum class ConflictRule { MaxProbability = 0, ProportionalToProbability = 1 };

// Model parameters. The defaults give a plain nearest-exit walker:
// sight radius 1, no trace coupling, no inertia, no friction, static trace.
struct Params {
  int r = 1;           // sight radius, >= 1
  double k_s = 1.0;    // coupling to the distance-to-exit field
  double k_d = 0.0;    // coupling to the trace field
  double k_i = 0.0;    // inertia bonus for repeating the last move
  double mu = 0.0;     // base friction probability, [0,1]
  double delta = 0.0;  // per-step trace decay probability, [0,1]
  double alpha = 0.0;  // per-step trace diffusion probability, [0,1]
  ConflictRule conflict = ConflictRule::MaxProbability;

  void validate() const {
    auto bad = [](const std::string& field, const std::string& why) {
      throw std::invalid_argument("params." + field + ": " + why);
    };
    if (r < 1) bad("r", "must be >= 1");
    auto finite = [&](const char* field, double v) {
      if (!std::isfinite(v)) bad(field, "must be finite");
    };
    finite("kS", k_s);
    finite("kD", k_d);
    finite("kI", k_i);
    if (!(mu >= 0.0 && mu <= 1.0)) bad("mu", "must be within [0,1]");
    if (!(delta >= 0.0 && delta <= 1.0)) bad("delta", "must be within [0,1]");
    if (!(alpha >= 0.0 && alpha <= 1.0)) bad("alpha", "must be within [0,1]");
  }
};

inline const char* to_string(ConflictRule rule) {
  return rule == ConflictRule::MaxProbability ? "max" : "proportional";
}

}  // namespace iffca
