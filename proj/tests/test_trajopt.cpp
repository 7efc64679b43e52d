#include "asym_pe/game_solver.hpp"
#include "asym_pe/sensitivity.hpp"
#include "asym_pe/trajopt.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace asym_pe;

namespace {

ScenarioConfig open_field() {
  ScenarioConfig c;
  c.pursuer_start = Vec2(0, 0);
  c.evader_start = Vec2(3, 0);
  c.obstacle_start = Vec2(500, 500);
  c.rho_nominal = Vec2(0, -0.25);
  c.rho_true = Vec2(0, -0.35);
  c.uncertainty_spec = UncertaintySpec::BothCartesian;
  c.N = 10;
  c.dt = 0.1;
  return c;
}

HorizonProblem problem(Role role, Objective obj, const GameState& s, const ControlSequence& opp,
                       const ScenarioConfig& cfg, std::uint64_t seed = 1) {
  HorizonProblem p;
  p.role = role;
  p.objective = obj;
  p.start = s;
  p.opponent_seq = opp;
  p.obstacle_model = ObstacleModel::Nominal;
  p.cfg = cfg;
  p.seed = seed;
  return p;
}

// Best objective over constant headings on a 0.5 degree grid.
double grid_oracle(const HorizonProblem& prob) {
  const double speed = prob.role == Role::PursuerMin ? prob.cfg.u_c : prob.cfg.v_c;
  double best = prob.role == Role::PursuerMin ? INFINITY : -INFINITY;
  for (int k = 0; k < 720; ++k) {
    const double h = -std::numbers::pi + k * (std::numbers::pi / 360.0);
    const double v = evaluate_objective(prob, ControlSequence::constant(h, speed, prob.cfg.N));
    best = prob.role == Role::PursuerMin ? std::min(best, v) : std::max(best, v);
  }
  return best;
}

double plan_risk(const HorizonProblem& prob, const ControlSequence& seq) {
  const auto states = rollout(prob.start, seq, prob.opponent_seq, prob.cfg, Role::PursuerMin);
  std::vector<RcsSample> samples;
  for (std::size_t i = 1; i < states.size(); ++i) {
    samples.push_back(rcs_sample(states[i].x_p, states[i].x_w_nominal, states[i].t, prob.cfg));
  }
  return risk_of_sequence(samples);
}

}  // namespace

TEST_CASE("rollout") {
  ScenarioConfig cfg = open_field();
  const GameState s = initial_state(cfg);
  SUBCASE("empty horizon") {
    const auto out = rollout(s, ControlSequence{{}, 1.0}, ControlSequence{{}, 0.6}, cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].x_p == s.x_p);
  }
  SUBCASE("straight headings are collinear with even spacing") {
    const auto out = rollout(s, ControlSequence::constant(0.4, 1.0, 10), ControlSequence::constant(-1.0, 0.6, 10), cfg);
    REQUIRE(out.size() == 11);
    const Vec2 dir(std::cos(0.4), std::sin(0.4));
    for (std::size_t i = 1; i < out.size(); ++i) {
      const Vec2 d = out[i].x_p - out[i - 1].x_p;
      CHECK(d.norm() == doctest::Approx(0.1).epsilon(1e-13));
      CHECK(std::abs(d.x() * dir.y() - d.y() * dir.x()) < 1e-15);
    }
  }
  SUBCASE("roles pick the sequence owner") {
    const ControlSequence a = ControlSequence::constant(0.0, 1.0, 3);
    const ControlSequence b = ControlSequence::constant(std::numbers::pi / 2, 0.6, 3);
    const auto as_p = rollout(s, a, b, cfg, Role::PursuerMin);
    const auto as_e = rollout(s, b, a, cfg, Role::EvaderMax);
    CHECK(as_p.back().x_p == as_e.back().x_p);
    CHECK(as_p.back().x_e == as_e.back().x_e);
  }
  SUBCASE("determinism and length checks") {
    const auto a = rollout(s, ControlSequence::constant(0.1, 1.0, 5), ControlSequence::constant(0.2, 0.6, 5), cfg);
    const auto b = rollout(s, ControlSequence::constant(0.1, 1.0, 5), ControlSequence::constant(0.2, 0.6, 5), cfg);
    CHECK(a.back().x_p == b.back().x_p);
    CHECK_THROWS_AS(rollout(s, ControlSequence::constant(0.1, 1.0, 5), ControlSequence::constant(0.2, 0.6, 4), cfg),
                    std::invalid_argument);
  }
}

TEST_CASE("evaluate_objective") {
  ScenarioConfig cfg = open_field();
  cfg.N = 1;
  cfg.evader_start = Vec2(5, 0);
  const GameState s = initial_state(cfg);
  const ControlSequence flee = ControlSequence::constant(0.0, 0.6, 1);
  const auto p = problem(Role::PursuerMin, Objective::TerminalDistance, s, flee, cfg);
  CHECK(evaluate_objective(p, ControlSequence::constant(0.0, 1.0, 1)) == doctest::Approx(4.96).epsilon(1e-14));

  SUBCASE("zero weight leaves the risk objective unchanged") {
    ScenarioConfig c = open_field();
    c.obstacle_start = Vec2(1.5, 1.0);
    c.Q = RiskWeight::scalar(0.0);
    GameState st = initial_state(c);
    st.t = 4.0;
    const ControlSequence opp = ControlSequence::constant(0.0, 0.6, c.N);
    const auto plain = problem(Role::PursuerMin, Objective::TerminalDistance, st, opp, c);
    const auto risky = problem(Role::PursuerMin, Objective::TerminalDistancePlusRisk, st, opp, c);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ang(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> h(static_cast<std::size_t>(c.N));
      for (double& a : h) a = ang(rng);
      const ControlSequence seq{h, 1.0};
      CHECK(evaluate_objective(plain, seq) == evaluate_objective(risky, seq));
    }
  }

  SUBCASE("deception payoff is zero when the model ends on the true obstacle") {
    ScenarioConfig c = open_field();
    c.evader_mode = EvaderMode::Deceptive;
    c.alpha_o = 0.0;
    c.alpha_d = 1.0;
    GameState st = initial_state(c);
    const ControlSequence ev_seq = ControlSequence::constant(0.7, c.v_c, c.N);
    // Pursuit model driven by the evader's previous position.
    Vec2 p = st.x_p;
    Vec2 e = st.x_e;
    for (int i = 0; i < c.N; ++i) {
      p += pure_pursuit_model(p, e, c.u_c) * c.dt;
      e += ev_seq.velocity(static_cast<std::size_t>(i)) * c.dt;
    }
    st.x_w_true = p - c.rho_true * (c.N * c.dt);
    auto d = problem(Role::EvaderMax, Objective::DeceptionBlend, st, ControlSequence{}, c);
    d.obstacle_model = ObstacleModel::True;
    CHECK(std::abs(evaluate_objective(d, ev_seq)) < 1e-12);
  }

  SUBCASE("invalid role and objective pairs") {
    auto bad = problem(Role::PursuerMin, Objective::DeceptionBlend, s, flee, cfg);
    CHECK_THROWS_AS(evaluate_objective(bad, ControlSequence::constant(0.0, 1.0, 1)), std::invalid_argument);
    bad = problem(Role::EvaderMax, Objective::TerminalDistancePlusRisk, s, ControlSequence::constant(0.0, 1.0, 1), cfg);
    CHECK_THROWS_AS(evaluate_objective(bad, ControlSequence::constant(0.0, 0.6, 1)), std::invalid_argument);
  }
}

TEST_CASE("finite-difference gradient agrees with a five-point stencil") {
  ScenarioConfig cfg = open_field();
  cfg.obstacle_start = Vec2(1.0, 0.6);
  cfg.Q = RiskWeight::scalar(1.0);
  GameState s = initial_state(cfg);
  s.t = 2.0;
  const ControlSequence opp = ControlSequence::constant(0.3, 0.6, cfg.N);
  const auto p = problem(Role::PursuerMin, Objective::TerminalDistancePlusRisk, s, opp, cfg);
  auto f = [&](std::span<const double> h) { return penalized_objective(p, h, 100.0); };

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ang(-1.2, 1.2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(static_cast<std::size_t>(cfg.N));
    for (double& a : x) a = ang(rng);
    const auto grad = central_difference_gradient(f, x, 1e-6);
    const double h = 1e-3;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto at = [&](double off) {
        std::vector<double> y = x;
        y[i] += off;
        return f(y);
      };
      const double rich = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
      CHECK(std::abs(grad[i] - rich) <= 1e-4 * std::max(1.0, std::abs(rich)));
    }
  }
}

TEST_CASE("obstacle-free best responses match the constant-heading grid") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> pos(-4.0, 4.0);
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  for (int trial = 0; trial < 6; ++trial) {
    ScenarioConfig cfg = open_field();
    cfg.evader_start = Vec2(pos(rng), pos(rng));
    if (cfg.evader_start.norm() < 1.5) cfg.evader_start += Vec2(2.0, 0.0);
    const GameState s = initial_state(cfg);
    const Role role = trial % 2 == 0 ? Role::PursuerMin : Role::EvaderMax;
    const double opp_speed = role == Role::PursuerMin ? cfg.v_c : cfg.u_c;
    const double own_speed = role == Role::PursuerMin ? cfg.u_c : cfg.v_c;
    const auto p = problem(role, Objective::TerminalDistance, s, ControlSequence::constant(ang(rng), opp_speed, cfg.N),
                           cfg, 100 + trial);
    const BestResponse br = best_response(p, ControlSequence::constant(ang(rng), own_speed, cfg.N));
    CAPTURE(trial);
    CHECK(br.constraint_max_violation == 0.0);
    CHECK(std::abs(br.objective_value - grid_oracle(p)) <= 1e-3);
    CHECK(br.objective_value == doctest::Approx(evaluate_objective(p, br.sequence)));
  }
}

TEST_CASE("best response never worsens a feasible initial guess") {
  ScenarioConfig cfg = open_field();
  cfg.obstacle_start = Vec2(1.5, 0.2);
  cfg.evader_start = Vec2(3.5, 0.0);
  const GameState s = initial_state(cfg);
  const ControlSequence opp = ControlSequence::constant(0.0, cfg.v_c, cfg.N);
  for (double h0 : {-1.2, -0.8, 1.0}) {
    CAPTURE(h0);
    const auto p = problem(Role::PursuerMin, Objective::TerminalDistance, s, opp, cfg, 9);
    const ControlSequence init = ControlSequence::constant(h0, cfg.u_c, cfg.N);
    REQUIRE(max_constraint_violation(p, init) == 0.0);
    const BestResponse br = best_response(p, init);
    CHECK(br.objective_value <= evaluate_objective(p, init));
    CHECK(max_constraint_violation(p, br.sequence) <= p.settings.feasibility_tol);
  }
}

TEST_CASE("accepted responses keep clear of the obstacle at every sample") {
  ScenarioConfig cfg = open_field();
  cfg.obstacle_start = Vec2(1.5, 0.0);  // directly between the players
  const GameState s = initial_state(cfg);
  const auto p = problem(Role::PursuerMin, Objective::TerminalDistance, s,
                         ControlSequence::constant(0.0, cfg.v_c, cfg.N), cfg, 4);
  const BestResponse br = best_response(p, ControlSequence::constant(0.0, cfg.u_c, cfg.N));
  const auto states = rollout(s, br.sequence, p.opponent_seq, cfg);
  for (std::size_t i = 1; i < states.size(); ++i) {
    CHECK(constraint_g(states[i].x_p, states[i].x_w_nominal, cfg.r_o) <= -p.settings.constraint_margin + 1e-6);
  }
}

TEST_CASE("zero risk weight collapses to the plain best response") {
  ScenarioConfig cfg = open_field();
  cfg.obstacle_start = Vec2(1.5, 0.9);
  cfg.Q = RiskWeight::scalar(0.0);
  GameState s = initial_state(cfg);
  s.t = 3.0;
  const ControlSequence opp = ControlSequence::constant(0.0, cfg.v_c, cfg.N);
  const ControlSequence init = ControlSequence::constant(0.0, cfg.u_c, cfg.N);
  const BestResponse a = best_response(problem(Role::PursuerMin, Objective::TerminalDistance, s, opp, cfg, 77), init);
  const BestResponse b =
      best_response(problem(Role::PursuerMin, Objective::TerminalDistancePlusRisk, s, opp, cfg, 77), init);
  CHECK(a.sequence.headings == b.sequence.headings);
  CHECK(a.objective_value == b.objective_value);
}

TEST_CASE("a heavy risk weight steers the plan to lower risk") {
  ScenarioConfig cfg = open_field();
  cfg.obstacle_start = Vec2(1.5, 1.3);
  cfg.evader_start = Vec2(3.0, 0.0);
  GameState s = initial_state(cfg);
  s.t = 5.0;
  const ControlSequence opp = ControlSequence::constant(0.0, cfg.v_c, cfg.N);
  const ControlSequence init = ControlSequence::constant(0.0, cfg.u_c, cfg.N);

  cfg.Q = RiskWeight::scalar(0.0);
  const auto plain_p = problem(Role::PursuerMin, Objective::TerminalDistance, s, opp, cfg, 3);
  const BestResponse plain = best_response(plain_p, init);
  cfg.Q = RiskWeight::scalar(50.0);
  const auto heavy_p = problem(Role::PursuerMin, Objective::TerminalDistancePlusRisk, s, opp, cfg, 3);
  const BestResponse heavy = best_response(heavy_p, init);

  const double risk_plain = plan_risk(heavy_p, plain.sequence);
  const double risk_heavy = plan_risk(heavy_p, heavy.sequence);
  CHECK(risk_heavy < risk_plain);
  // Moves away from the obstacle, which sits above the line of sight.
  const auto end_plain = rollout(s, plain.sequence, opp, cfg).back();
  const auto end_heavy = rollout(s, heavy.sequence, opp, cfg).back();
  CHECK((end_heavy.x_p - end_heavy.x_w_nominal).norm() > (end_plain.x_p - end_plain.x_w_nominal).norm());
}

TEST_CASE("best response is deterministic for a fixed seed") {
  ScenarioConfig cfg = open_field();
  cfg.obstacle_start = Vec2(1.5, 0.3);
  const GameState s = initial_state(cfg);
  const auto p = problem(Role::PursuerMin, Objective::TerminalDistance, s,
                         ControlSequence::constant(0.0, cfg.v_c, cfg.N), cfg, 1234);
  const ControlSequence init = ControlSequence::constant(0.0, cfg.u_c, cfg.N);
  const BestResponse a = best_response(p, init);
  const BestResponse b = best_response(p, init);
  CHECK(a.sequence.headings == b.sequence.headings);
  CHECK(a.solver_iters == b.solver_iters);
}

TEST_CASE("an unavoidable collision raises NoFeasibleSequence") {
  ScenarioConfig cfg = open_field();
  cfg.r_o = 3.0;
  GameState s = initial_state(cfg);
  s.x_w_nominal = Vec2(0.0, 0.1);  // the pursuer already sits deep inside
  const auto p = problem(Role::PursuerMin, Objective::TerminalDistance, s,
                         ControlSequence::constant(0.0, cfg.v_c, cfg.N), cfg);
  CHECK_THROWS_AS(best_response(p, ControlSequence::constant(0.0, cfg.u_c, cfg.N)), NoFeasibleSequence);
}
