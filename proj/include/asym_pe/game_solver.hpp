#pragma once

// Per-step solutions of the horizon games.
//
// The pursuer's game and the evader's original game are solved by alternating
// best responses (Gauss-Seidel) until both heading sequences stop changing.
// The deceptive evader instead optimises against a pure-pursuit model of the
// pursuer, which needs no fixed-point iteration.

#include "asym_pe/game_core.hpp"
#include "asym_pe/trajopt.hpp"

#include <cstdint>
#include <stdexcept>

namespace asym_pe {

struct GaussSeidelConfig {
  double conv_tol = 5e-3;
  int max_iters = 50;
};

struct WarmStart {
  ControlSequence pursuer;
  ControlSequence evader;
};

/// Line-of-sight warm start: pursuer toward the evader, evader straight away.
WarmStart line_of_sight_warm_start(const GameState& s, const ScenarioConfig& cfg);

struct StepDecision {
  double u_head = 0.0;
  double v_head = 0.0;
  int iters = 0;
  bool converged = false;
  double residual_u = 0.0;
  double residual_v = 0.0;
  // Last iterates; the solving player's own plan and its model of the opponent.
  ControlSequence pursuer_plan;
  ControlSequence evader_plan;
};

class CoincidentPositions : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// u_c * (x_e - x_p_hat) / |x_e - x_p_hat|.
Vec2 pure_pursuit_model(const Vec2& x_p_hat, const Vec2& x_e, double u_c);

/// Seed for one best response, fixed by the scenario seed, the step index,
/// the Gauss-Seidel iteration and the optimising role only.
std::uint64_t best_response_seed(std::uint64_t scenario_seed, long step, int iteration, Role role);

/// The pursuer's game, solved with the nominal obstacle for both players.
/// Minimises terminal distance plus risk when `desensitized`. Any true
/// obstacle information in `s` or `cfg` is discarded before solving.
StepDecision solve_pursuer_game(const GameState& s, const ScenarioConfig& cfg, const GaussSeidelConfig& gs,
                                bool desensitized, const WarmStart& warm,
                                const TrajoptSettings& settings = {});

/// The evader's original game: the modelled pursuer plans against the nominal
/// obstacle, the evader against the true one.
StepDecision solve_evader_original(const GameState& s, const ScenarioConfig& cfg, const GaussSeidelConfig& gs,
                                   const WarmStart& warm, const TrajoptSettings& settings = {});

/// The evader's deceptive optimisation against a pure-pursuit pursuer model.
StepDecision solve_evader_deceptive(const GameState& s, const ScenarioConfig& cfg, const ControlSequence& warm,
                                    const TrajoptSettings& settings = {});

/// Strips everything the pursuer cannot know: the true obstacle velocity and
/// position are replaced by their nominal counterparts.
ScenarioConfig pursuer_view(const ScenarioConfig& cfg);
GameState pursuer_view(const GameState& s);

}  // namespace asym_pe
