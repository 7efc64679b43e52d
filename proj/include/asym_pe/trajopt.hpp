#pragma once

// Finite-horizon best responses over heading sequences. One player optimises
// its N headings while the opponent's sequence (or feedback model) is held
// fixed. Obstacle avoidance is imposed at every horizon sample through an
// exterior quadratic penalty that is escalated until the plan is feasible.

#include "asym_pe/game_core.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace asym_pe {

enum class Role { PursuerMin, EvaderMax };

enum class Objective {
  TerminalDistance,
  // Terminal distance plus the RCS risk of the pursuer's plan.
  TerminalDistancePlusRisk,
  // Evader only: alpha_o * distance to a pure-pursuit pursuer model minus
  // alpha_d * distance of that model to the true obstacle.
  DeceptionBlend,
};

enum class ObstacleModel { Nominal, True };

struct TrajoptSettings {
  int multistart = 8;
  double feasibility_tol = 1e-6;
  // Planned samples must satisfy g <= -constraint_margin. The exterior
  // penalty settles marginally outside its constraint, and termination counts
  // g >= 0 as a hit, so plans keep this much clearance in g units.
  double constraint_margin = 1e-3;
  double mu_initial = 10.0;
  double mu_growth = 10.0;
  double mu_max = 1e7;
  double initial_step = 0.2;  // rad
  double backtrack = 0.5;
  double armijo = 1e-4;
  double min_step = 1e-10;
  int max_descent_iters = 60;
  double fd_step = 1e-6;
  double perturbation_sigma = 0.5;  // rad, spread of the perturbed starts
};

struct HorizonProblem {
  Role role = Role::PursuerMin;
  Objective objective = Objective::TerminalDistance;
  GameState start;
  ControlSequence opponent_seq;  // unused by DeceptionBlend
  ObstacleModel obstacle_model = ObstacleModel::Nominal;
  ScenarioConfig cfg;
  std::uint64_t seed = 0;
  TrajoptSettings settings;
};

struct BestResponse {
  ControlSequence sequence;
  double objective_value = 0.0;
  double constraint_max_violation = 0.0;
  int solver_iters = 0;
  bool converged = false;
};

class NoFeasibleSequence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// N + 1 states starting at `start`; `mine` belongs to `role`, `theirs` to the
/// opponent. Throws std::invalid_argument on a length mismatch.
std::vector<GameState> rollout(const GameState& start, const ControlSequence& mine, const ControlSequence& theirs,
                               const ScenarioConfig& cfg, Role role = Role::PursuerMin);

/// Objective in its natural sense (minimised by the pursuer, maximised by the
/// evader), without the constraint penalty.
double evaluate_objective(const HorizonProblem& prob, const ControlSequence& seq);

/// Largest positive value of g + constraint_margin for the optimising player
/// over the horizon samples 1..N against prob.obstacle_model; 0 when clear.
double max_constraint_violation(const HorizonProblem& prob, const ControlSequence& seq);

/// Objective in minimisation form plus mu * sum max(0, g_i)^2.
double penalized_objective(const HorizonProblem& prob, std::span<const double> headings, double mu);

/// Central-difference gradient with step h.
std::vector<double> central_difference_gradient(const std::function<double(std::span<const double>)>& f,
                                                std::span<const double> x, double h);

/// Throws NoFeasibleSequence when no start reaches the feasibility tolerance.
BestResponse best_response(const HorizonProblem& prob, const ControlSequence& init);

}  // namespace asym_pe
