#include "asym_pe/game_solver.hpp"

#include <cmath>

namespace asym_pe {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30u)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27u)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31u);
}

long step_index(const GameState& s, const ScenarioConfig& cfg) { return std::lround(s.t / cfg.dt); }

struct Blocks {
  ObstacleModel pursuer_obstacle;
  Objective pursuer_objective;
  ObstacleModel evader_obstacle;
};

StepDecision gauss_seidel(const GameState& s, const ScenarioConfig& cfg, const GaussSeidelConfig& gs,
                          const WarmStart& warm, const TrajoptSettings& settings, const Blocks& blocks) {
  if (gs.max_iters < 1 || !(gs.conv_tol > 0.0)) throw std::invalid_argument("invalid Gauss-Seidel config");
  if (static_cast<int>(warm.pursuer.size()) != cfg.N || static_cast<int>(warm.evader.size()) != cfg.N) {
    throw std::invalid_argument("warm start length differs from horizon N");
  }
  const long k = step_index(s, cfg);

  ControlSequence u = warm.pursuer;
  ControlSequence v = warm.evader;
  StepDecision out;
  for (int i = 1; i <= gs.max_iters; ++i) {
    HorizonProblem pp{Role::PursuerMin, blocks.pursuer_objective, s,   v,
                      blocks.pursuer_obstacle, cfg, best_response_seed(cfg.seed, k, i, Role::PursuerMin), settings};
    const BestResponse bu = best_response(pp, u);

    HorizonProblem ep{Role::EvaderMax, Objective::TerminalDistance, s,   bu.sequence,
                      blocks.evader_obstacle, cfg, best_response_seed(cfg.seed, k, i, Role::EvaderMax), settings};
    const BestResponse bv = best_response(ep, v);

    out.residual_u = sequence_distance(bu.sequence, u);
    out.residual_v = sequence_distance(bv.sequence, v);
    u = bu.sequence;
    v = bv.sequence;
    out.iters = i;
    if (out.residual_u <= gs.conv_tol && out.residual_v <= gs.conv_tol) {
      out.converged = true;
      break;
    }
  }
  out.u_head = u.headings.front();
  out.v_head = v.headings.front();
  out.pursuer_plan = std::move(u);
  out.evader_plan = std::move(v);
  return out;
}

}  // namespace

WarmStart line_of_sight_warm_start(const GameState& s, const ScenarioConfig& cfg) {
  const Vec2 los = s.x_e - s.x_p;
  const double heading = std::atan2(los.y(), los.x());
  return WarmStart{ControlSequence::constant(heading, cfg.u_c, cfg.N),
                   ControlSequence::constant(heading, cfg.v_c, cfg.N)};
}

Vec2 pure_pursuit_model(const Vec2& x_p_hat, const Vec2& x_e, double u_c) {
  const Vec2 los = x_e - x_p_hat;
  const double dist = los.norm();
  if (dist == 0.0) throw CoincidentPositions("pure_pursuit_model: pursuer model coincides with the evader");
  return u_c * los / dist;
}

std::uint64_t best_response_seed(std::uint64_t scenario_seed, long step, int iteration, Role role) {
  std::uint64_t h = splitmix64(scenario_seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(step));
  h = splitmix64(h ^ static_cast<std::uint64_t>(iteration));
  return splitmix64(h ^ (role == Role::PursuerMin ? 0x50u : 0x45u));
}

ScenarioConfig pursuer_view(const ScenarioConfig& cfg) {
  ScenarioConfig view = cfg;
  view.rho_true = cfg.rho_nominal;
  // The pursuer does not know whether the evader deceives.
  view.evader_mode = EvaderMode::Original;
  view.alpha_o = 0.0;
  view.alpha_d = 0.0;
  return view;
}

GameState pursuer_view(const GameState& s) {
  GameState view = s;
  view.x_w_true = s.x_w_nominal;
  return view;
}

StepDecision solve_pursuer_game(const GameState& s, const ScenarioConfig& cfg, const GaussSeidelConfig& gs,
                                bool desensitized, const WarmStart& warm, const TrajoptSettings& settings) {
  const Blocks blocks{ObstacleModel::Nominal,
                      desensitized ? Objective::TerminalDistancePlusRisk : Objective::TerminalDistance,
                      ObstacleModel::Nominal};
  return gauss_seidel(pursuer_view(s), pursuer_view(cfg), gs, warm, settings, blocks);
}

StepDecision solve_evader_original(const GameState& s, const ScenarioConfig& cfg, const GaussSeidelConfig& gs,
                                   const WarmStart& warm, const TrajoptSettings& settings) {
  const Blocks blocks{ObstacleModel::Nominal, Objective::TerminalDistance, ObstacleModel::True};
  return gauss_seidel(s, cfg, gs, warm, settings, blocks);
}

StepDecision solve_evader_deceptive(const GameState& s, const ScenarioConfig& cfg, const ControlSequence& warm,
                                    const TrajoptSettings& settings) {
  if (static_cast<int>(warm.size()) != cfg.N) throw std::invalid_argument("warm start length differs from horizon N");
  const long k = step_index(s, cfg);
  HorizonProblem prob{Role::EvaderMax, Objective::DeceptionBlend, s, ControlSequence{}, ObstacleModel::True, cfg,
                      best_response_seed(cfg.seed, k, 1, Role::EvaderMax), settings};
  const BestResponse br = best_response(prob, warm);

  StepDecision out;
  out.iters = 1;
  out.converged = true;
  out.residual_u = 0.0;
  out.residual_v = sequence_distance(br.sequence, warm);
  out.v_head = br.sequence.headings.front();
  // Report the pure-pursuit model's first heading as the modelled pursuer move.
  const Vec2 pp = s.x_e != s.x_p ? pure_pursuit_model(s.x_p, s.x_e, cfg.u_c) : Vec2(cfg.u_c, 0.0);
  out.u_head = std::atan2(pp.y(), pp.x());
  out.evader_plan = br.sequence;
  return out;
}

}  // namespace asym_pe
