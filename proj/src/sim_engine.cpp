#include "asym_pe/sim_engine.hpp"

#include "asym_pe/sensitivity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace asym_pe {
namespace {

constexpr double kNoDecision = std::numeric_limits<double>::quiet_NaN();

double plan_risk(const GameState& s, const ControlSequence& plan, const ScenarioConfig& cfg) {
  std::vector<RcsSample> samples;
  samples.reserve(plan.size());
  Vec2 x_p = s.x_p;
  Vec2 x_w = s.x_w_nominal;
  double t = s.t;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    x_p += plan.velocity(i) * cfg.dt;
    x_w += cfg.rho_nominal * cfg.dt;
    t += cfg.dt;
    samples.push_back(rcs_sample(x_p, x_w, t, cfg));
  }
  return risk_of_sequence(samples);
}

SolveDiagnostics diagnostics_of(const StepDecision& d) {
  return SolveDiagnostics{d.iters, d.converged, d.residual_u, d.residual_v, false};
}

std::string warning(const char* who, double t, const char* what) {
  std::ostringstream os;
  os << who << " t=" << t << ": " << what << "; holding previous heading";
  return os.str();
}

}  // namespace

bool uses_desensitization(const ScenarioConfig& cfg) {
  if (cfg.Q.is_scalar()) return cfg.Q.scalar_value() != 0.0;
  return !cfg.Q.matrix_value().isZero(0.0);
}

SimulationTrace run(const ScenarioConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  SimulationTrace trace;
  trace.cfg = cfg;
  const bool desensitized = opts.force_desensitized.value_or(uses_desensitization(cfg));

  GameState s = initial_state(cfg);
  const WarmStart los = line_of_sight_warm_start(s, cfg);
  WarmStart pursuer_warm = los;
  WarmStart evader_warm = los;
  double last_u = los.pursuer.headings.front();
  double last_v = los.evader.headings.front();

  while (true) {
    if (const auto outcome = check_termination(s, cfg)) {
      StepRecord terminal;
      terminal.state = s;
      terminal.u_head = kNoDecision;
      terminal.v_head = kNoDecision;
      terminal.risk = kNoDecision;
      trace.records.push_back(std::move(terminal));
      trace.outcome = *outcome;
      break;
    }

    StepRecord rec;
    rec.state = s;
    rec.pursuer_warm = pursuer_warm;

    // Pursuer: nominal obstacle only.
    try {
      const StepDecision d = solve_pursuer_game(s, cfg, opts.gs, desensitized, pursuer_warm, opts.trajopt);
      rec.u_head = d.u_head;
      rec.pursuer = diagnostics_of(d);
      rec.pursuer_plan = d.pursuer_plan;
      rec.risk = plan_risk(pursuer_view(s), d.pursuer_plan, cfg);
      pursuer_warm = WarmStart{shift_and_hold(d.pursuer_plan), shift_and_hold(d.evader_plan)};
    } catch (const NoFeasibleSequence&) {
      rec.u_head = last_u;
      rec.pursuer.infeasible = true;
      rec.risk = 0.0;
      pursuer_warm = WarmStart{shift_and_hold(pursuer_warm.pursuer), shift_and_hold(pursuer_warm.evader)};
      trace.warnings.push_back(warning("pursuer", s.t, "no feasible plan"));
    }

    // Evader: true obstacle.
    try {
      if (cfg.evader_mode == EvaderMode::Deceptive) {
        const StepDecision d = solve_evader_deceptive(s, cfg, evader_warm.evader, opts.trajopt);
        rec.v_head = d.v_head;
        rec.evader = diagnostics_of(d);
        rec.evader_plan = d.evader_plan;
        evader_warm.evader = shift_and_hold(d.evader_plan);
      } else {
        const StepDecision d = solve_evader_original(s, cfg, opts.gs, evader_warm, opts.trajopt);
        rec.v_head = d.v_head;
        rec.evader = diagnostics_of(d);
        rec.evader_plan = d.evader_plan;
        evader_warm = WarmStart{shift_and_hold(d.pursuer_plan), shift_and_hold(d.evader_plan)};
      }
    } catch (const NoFeasibleSequence&) {
      rec.v_head = last_v;
      rec.evader.infeasible = true;
      evader_warm = WarmStart{shift_and_hold(evader_warm.pursuer), shift_and_hold(evader_warm.evader)};
      trace.warnings.push_back(warning("evader", s.t, "no feasible plan"));
    }

    last_u = rec.u_head;
    last_v = rec.v_head;
    trace.records.push_back(rec);
    s = step_state(s, rec.u_head, rec.v_head, cfg);
  }
  return trace;
}

std::vector<SimulationTrace> run_batch(std::span<const ScenarioConfig> cfgs, const RunOptions& opts) {
  std::vector<SimulationTrace> out(cfgs.size());
  if (cfgs.empty()) return out;
  const std::size_t workers =
      std::min<std::size_t>(cfgs.size(), std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(cfgs.size());
  auto work = [&] {
    for (std::size_t i = next++; i < cfgs.size(); i = next++) {
      try {
        out[i] = run(cfgs[i], opts);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  pool.clear();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<GameState> replay(const ScenarioConfig& cfg, std::span<const StepRecord> records) {
  std::vector<GameState> states;
  if (records.empty()) return states;
  states.reserve(records.size());
  states.push_back(records.front().state);
  for (std::size_t i = 0; i + 1 < records.size(); ++i) {
    states.push_back(step_state(states.back(), records[i].u_head, records[i].v_head, cfg));
  }
  return states;
}

}  // namespace asym_pe
