#pragma once

// Closed-loop receding-horizon simulation. At every step each player solves
// its own horizon game from the shared pre-step state with its own knowledge
// of the obstacle, the first headings are applied, and the world advances
// under the true obstacle motion.

#include "asym_pe/game_core.hpp"
#include "asym_pe/game_solver.hpp"
#include "asym_pe/trajopt.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace asym_pe {

struct SolveDiagnostics {
  int iters = 0;
  bool converged = false;
  double residual_u = 0.0;
  double residual_v = 0.0;
  bool infeasible = false;  // no feasible plan; previous heading held
};

struct StepRecord {
  GameState state;
  // NaN on the terminal record, where no decision is taken.
  double u_head = 0.0;
  double v_head = 0.0;
  double risk = 0.0;
  SolveDiagnostics pursuer;
  SolveDiagnostics evader;
  // Inputs and outputs of the pursuer's solve, kept for audits and replays.
  WarmStart pursuer_warm;
  ControlSequence pursuer_plan;
  ControlSequence evader_plan;
};

struct SimulationTrace {
  ScenarioConfig cfg;
  std::vector<StepRecord> records;
  Outcome outcome;
  std::vector<std::string> warnings;
};

struct RunOptions {
  GaussSeidelConfig gs;
  TrajoptSettings trajopt;
  // Overrides the default choice (desensitised iff Q != 0).
  std::optional<bool> force_desensitized;
};

/// Whether the pursuer's game includes the risk term by default.
bool uses_desensitization(const ScenarioConfig& cfg);

/// Validates cfg, then simulates until an outcome is reached.
SimulationTrace run(const ScenarioConfig& cfg, const RunOptions& opts = {});

/// Independent runs on worker threads; output order follows input order.
std::vector<SimulationTrace> run_batch(std::span<const ScenarioConfig> cfgs, const RunOptions& opts = {});

/// Re-applies the logged headings from the first record and returns the
/// reconstructed states, one per record.
std::vector<GameState> replay(const ScenarioConfig& cfg, std::span<const StepRecord> records);

}  // namespace asym_pe
