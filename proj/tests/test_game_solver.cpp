#include "asym_pe/game_solver.hpp"
#include "asym_pe/presets.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace asym_pe;

namespace {

ScenarioConfig far_obstacle() {
  ScenarioConfig c;
  c.pursuer_start = Vec2(0, 0);
  c.evader_start = Vec2(3, 1);
  c.obstacle_start = Vec2(-400, 300);
  c.rho_nominal = Vec2(0, -0.25);
  c.rho_true = Vec2(0, -0.35);
  c.Q = RiskWeight::scalar(1.0);
  return c;
}

double angle_gap(double a, double b) { return std::abs(wrap_angle(a - b)); }

double los_heading(const GameState& s) { return std::atan2(s.x_e.y() - s.x_p.y(), s.x_e.x() - s.x_p.x()); }

}  // namespace

TEST_CASE("pure pursuit model") {
  const Vec2 a = pure_pursuit_model(Vec2(0, 0), Vec2(3, 0), 1.0);
  CHECK(a.x() == 1.0);
  CHECK(a.y() == 0.0);
  const Vec2 b = pure_pursuit_model(Vec2(1, 1), Vec2(1, 2), 2.0);
  CHECK(b.x() == 0.0);
  CHECK(b.y() == 2.0);
  CHECK_THROWS_AS(pure_pursuit_model(Vec2(1, 1), Vec2(1, 1), 1.0), CoincidentPositions);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const Vec2 v = pure_pursuit_model(Vec2(n(rng), n(rng)), Vec2(n(rng), n(rng)), 1.7);
    CHECK(v.norm() == doctest::Approx(1.7).epsilon(1e-15));
  }
}

TEST_CASE("best response seeds separate step, iteration and role") {
  std::set<std::uint64_t> seen;
  for (long k = 0; k < 20; ++k) {
    for (int i = 1; i <= 5; ++i) {
      seen.insert(best_response_seed(42, k, i, Role::PursuerMin));
      seen.insert(best_response_seed(42, k, i, Role::EvaderMax));
    }
  }
  CHECK(seen.size() == 200);
  CHECK(best_response_seed(42, 3, 2, Role::PursuerMin) == best_response_seed(42, 3, 2, Role::PursuerMin));
  CHECK(best_response_seed(42, 3, 2, Role::PursuerMin) != best_response_seed(43, 3, 2, Role::PursuerMin));
}

TEST_CASE("pursuer view hides the true obstacle") {
  const ScenarioConfig cfg = preset("fig8_desensitized_vs_deception");
  const ScenarioConfig view = pursuer_view(cfg);
  CHECK(view.rho_true == cfg.rho_nominal);
  CHECK(view.evader_mode == EvaderMode::Original);
  GameState s = initial_state(cfg);
  s.x_w_true = Vec2(9, 9);
  CHECK(pursuer_view(s).x_w_true == s.x_w_nominal);
}

TEST_CASE("open field: pursue and flee along the line of sight") {
  const ScenarioConfig cfg = far_obstacle();
  const GameState s = initial_state(cfg);
  const WarmStart warm = line_of_sight_warm_start(s, cfg);
  const double los = los_heading(s);

  const StepDecision p = solve_pursuer_game(s, cfg, GaussSeidelConfig{}, false, warm);
  CHECK(p.converged);
  CHECK(p.iters <= 2);
  CHECK(angle_gap(p.u_head, los) < 1e-2);
  CHECK(angle_gap(p.v_head, los) < 1e-2);
  CHECK(p.residual_u >= 0.0);
  CHECK(p.residual_v >= 0.0);
  CHECK(p.residual_u <= 5e-3);
  CHECK(p.residual_v <= 5e-3);

  SUBCASE("risk is negligible, so desensitising changes little") {
    const StepDecision d = solve_pursuer_game(s, cfg, GaussSeidelConfig{}, true, warm);
    CHECK(angle_gap(d.u_head, p.u_head) < 1e-2);
  }
  SUBCASE("the evader's own game flees") {
    const StepDecision e = solve_evader_original(s, cfg, GaussSeidelConfig{}, warm);
    CHECK(angle_gap(e.v_head, los) < 1e-2);
  }
  SUBCASE("from a poor warm start the fixed point still lines up") {
    const WarmStart bad{ControlSequence::constant(los + 2.0, cfg.u_c, cfg.N),
                        ControlSequence::constant(los - 2.0, cfg.v_c, cfg.N)};
    const StepDecision q = solve_pursuer_game(s, cfg, GaussSeidelConfig{}, false, bad);
    CHECK(q.converged);
    CHECK(angle_gap(q.u_head, los) < 1e-2);
  }
}

TEST_CASE("zero risk weight: desensitised and plain pursuer games agree exactly") {
  const ScenarioConfig cfg = preset("fig2_collision");
  const GameState s = initial_state(cfg);
  const WarmStart warm = line_of_sight_warm_start(s, cfg);
  const StepDecision a = solve_pursuer_game(s, cfg, GaussSeidelConfig{}, false, warm);
  const StepDecision b = solve_pursuer_game(s, cfg, GaussSeidelConfig{}, true, warm);
  CHECK(a.u_head == b.u_head);
  CHECK(a.pursuer_plan.headings == b.pursuer_plan.headings);
  CHECK(a.iters == b.iters);
}

TEST_CASE("fig2 first pursuer heading is close to the line of sight") {
  const ScenarioConfig cfg = preset("fig2_collision");
  const GameState s = initial_state(cfg);
  const StepDecision d = solve_pursuer_game(s, cfg, GaussSeidelConfig{}, false, line_of_sight_warm_start(s, cfg));
  CHECK(angle_gap(d.u_head, los_heading(s)) < 0.15);
}

TEST_CASE("with matching obstacle models the evader's game equals the pursuer's") {
  ScenarioConfig cfg = preset("fig3_desensitized");
  cfg.rho_true = cfg.rho_nominal;
  GameState s = initial_state(cfg);
  const WarmStart warm = line_of_sight_warm_start(s, cfg);
  const StepDecision p = solve_pursuer_game(s, cfg, GaussSeidelConfig{}, false, warm);
  const StepDecision e = solve_evader_original(s, cfg, GaussSeidelConfig{}, warm);
  CHECK(p.v_head == e.v_head);
  CHECK(p.evader_plan.headings == e.evader_plan.headings);
}

TEST_CASE("fig4: the evader turns off the line of sight near the true obstacle") {
  const ScenarioConfig cfg = preset("fig4_rho1");
  const GameState s = initial_state(cfg);
  const StepDecision e = solve_evader_original(s, cfg, GaussSeidelConfig{}, line_of_sight_warm_start(s, cfg));
  CHECK(std::abs(std::sin(e.v_head - los_heading(s))) > 0.05);
}

TEST_CASE("fig7: the deceptive evader heads toward the true obstacle early on") {
  const ScenarioConfig cfg = preset("fig7_deception_collision");
  const GameState s = initial_state(cfg);
  const StepDecision e = solve_evader_deceptive(s, cfg, line_of_sight_warm_start(s, cfg).evader);
  const Vec2 dir(std::cos(e.v_head), std::sin(e.v_head));
  CHECK(dir.dot(s.x_w_true - s.x_e) > 0.0);
  CHECK(e.converged);
  CHECK(e.iters == 1);
}

TEST_CASE("deceptive evader against a grid of constant headings") {
  const ScenarioConfig cfg = preset("fig7_deception_collision");
  const GameState s = initial_state(cfg);
  const StepDecision e = solve_evader_deceptive(s, cfg, line_of_sight_warm_start(s, cfg).evader);
  HorizonProblem prob{Role::EvaderMax, Objective::DeceptionBlend, s, ControlSequence{}, ObstacleModel::True, cfg, 0,
                      TrajoptSettings{}};
  const double got = evaluate_objective(prob, e.evader_plan);
  const double flee = evaluate_objective(prob, ControlSequence::constant(los_heading(s), cfg.v_c, cfg.N));
  CHECK(got >= flee);
  double grid_best = -INFINITY;
  for (int k = 0; k < 720; ++k) {
    const ControlSequence c = ControlSequence::constant(-std::numbers::pi + k * std::numbers::pi / 360, cfg.v_c, cfg.N);
    if (max_constraint_violation(prob, c) == 0.0) grid_best = std::max(grid_best, evaluate_objective(prob, c));
  }
  CHECK(got >= grid_best - 1e-3);
}

TEST_CASE("Gauss-Seidel solutions are reproducible") {
  const ScenarioConfig cfg = preset("fig3_desensitized");
  GameState s = initial_state(cfg);
  s = step_state(s, -0.3, 0.1, cfg);
  const WarmStart warm = line_of_sight_warm_start(s, cfg);
  const StepDecision a = solve_pursuer_game(s, cfg, GaussSeidelConfig{}, true, warm);
  const StepDecision b = solve_pursuer_game(s, cfg, GaussSeidelConfig{}, true, warm);
  CHECK(a.u_head == b.u_head);
  CHECK(a.v_head == b.v_head);
  CHECK(a.iters == b.iters);
  CHECK(a.residual_u == b.residual_u);
  if (a.converged) {
    CHECK(a.residual_u <= 5e-3);
    CHECK(a.residual_v <= 5e-3);
  }
}

TEST_CASE("bad solver inputs are rejected") {
  const ScenarioConfig cfg = far_obstacle();
  const GameState s = initial_state(cfg);
  const WarmStart warm = line_of_sight_warm_start(s, cfg);
  CHECK_THROWS_AS(solve_pursuer_game(s, cfg, GaussSeidelConfig{0.0, 10}, false, warm), std::invalid_argument);
  CHECK_THROWS_AS(solve_pursuer_game(s, cfg, GaussSeidelConfig{1e-3, 0}, false, warm), std::invalid_argument);
  WarmStart short_warm = warm;
  short_warm.pursuer.headings.pop_back();
  CHECK_THROWS_AS(solve_pursuer_game(s, cfg, GaussSeidelConfig{}, false, short_warm), std::invalid_argument);
}
