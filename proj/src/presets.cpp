#include "asym_pe/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace asym_pe {
namespace {

Vec2 polar(double speed, double heading_deg) {
  const double a = heading_deg * std::numbers::pi / 180.0;
  return Vec2(speed * std::cos(a), speed * std::sin(a));
}

// Evader flees an obstacle dropping across the line of sight.
ScenarioConfig vertical_obstacle_base() {
  ScenarioConfig c;
  c.pursuer_start = Vec2(0.0, 0.0);
  c.evader_start = Vec2(3.0, 0.0);
  c.obstacle_start = Vec2(2.0, 1.15);
  c.u_c = 1.0;
  c.v_c = 0.6;
  c.epsilon = 0.3;
  c.r_o = 0.75;
  c.rho_nominal = Vec2(0.0, -0.25);
  c.rho_true = Vec2(0.0, -0.35);
  c.uncertainty_spec = UncertaintySpec::Rho2Only;
  c.N = 10;
  c.dt = 0.1;
  c.Q = RiskWeight::scalar(0.0);
  c.alpha_o = 0.0;
  c.alpha_d = 1.0;
  c.evader_mode = EvaderMode::Original;
  c.t_max = 10.0;
  c.seed = 0;
  return c;
}

ScenarioConfig horizontal_obstacle_base() {
  ScenarioConfig c = vertical_obstacle_base();
  c.N = 5;
  c.dt = 0.2;
  c.obstacle_start = Vec2(4.0, 0.1);
  c.rho_nominal = Vec2(-0.25, 0.0);
  c.rho_true = Vec2(-0.35, 0.0);
  c.uncertainty_spec = UncertaintySpec::Rho1Only;
  c.Q = RiskWeight::scalar(1.0);
  return c;
}

ScenarioConfig deception_base() {
  ScenarioConfig c = vertical_obstacle_base();
  c.evader_start = Vec2(4.0, 0.0);
  c.obstacle_start = Vec2(3.0, 1.65);
  c.evader_mode = EvaderMode::Deceptive;
  c.alpha_o = 0.0;
  c.alpha_d = 1.0;
  c.uncertainty_spec = UncertaintySpec::BothCartesian;
  return c;
}

ScenarioConfig make(std::string_view name) {
  if (name == "fig2_collision") return vertical_obstacle_base();
  if (name == "fig3_desensitized") {
    ScenarioConfig c = vertical_obstacle_base();
    c.Q = RiskWeight::scalar(1.0);
    return c;
  }
  if (name == "fig4_rho1") return horizontal_obstacle_base();
  if (name == "fig5_fast_obstacle") {
    ScenarioConfig c = horizontal_obstacle_base();
    c.obstacle_start = Vec2(-1.0, 0.1);
    c.rho_nominal = Vec2(1.3, 0.0);
    c.rho_true = Vec2(1.4, 0.0);
    return c;
  }
  if (name == "fig6_heading") {
    ScenarioConfig c = vertical_obstacle_base();
    c.obstacle_start = Vec2(4.5, 1.0);
    c.rho_nominal = polar(0.3, 180.0);
    c.rho_true = polar(0.3, -150.0);
    c.uncertainty_spec = UncertaintySpec::HeadingOnly;
    c.Q = RiskWeight::scalar(2.5);
    return c;
  }
  if (name == "fig7_deception_collision") return deception_base();
  if (name == "fig8_desensitized_vs_deception") {
    ScenarioConfig c = deception_base();
    c.Q = RiskWeight::scalar(0.5);
    return c;
  }
  if (name == "fig9_local_minimum") {
    ScenarioConfig c = deception_base();
    c.Q = RiskWeight::scalar(0.5);
    c.uncertainty_spec = UncertaintySpec::Rho2Only;
    return c;
  }
  throw std::out_of_range("unknown preset '" + std::string(name) + "'");
}

}  // namespace

const std::vector<std::string_view>& preset_names() {
  static const std::vector<std::string_view> names = {
      "fig2_collision",           "fig3_desensitized",
      "fig4_rho1",                "fig5_fast_obstacle",
      "fig6_heading",             "fig7_deception_collision",
      "fig8_desensitized_vs_deception", "fig9_local_minimum",
  };
  return names;
}

ScenarioConfig preset(std::string_view name) { return make(name); }

const std::vector<PresetExpectation>& preset_expectations() {
  using K = OutcomeKind;
  static const std::vector<PresetExpectation> table = {
      {"fig2_collision", {K::PursuerCollision}, std::nullopt},
      {"fig3_desensitized", {K::Capture}, 5.7},
      {"fig4_rho1", {K::Capture}, 5.6},
      {"fig5_fast_obstacle", {K::Capture}, 6.4},
      {"fig6_heading", {K::Capture}, 10.0},
      {"fig7_deception_collision", {K::PursuerCollision}, 2.6},
      {"fig8_desensitized_vs_deception", {K::Capture}, 8.4},
      {"fig9_local_minimum", {K::Timeout, K::PursuerCollision, K::EvaderCollision}, std::nullopt},
  };
  return table;
}

const PresetExpectation& preset_expectation(std::string_view name) {
  for (const auto& e : preset_expectations()) {
    if (e.name == name) return e;
  }
  throw std::out_of_range("no expectation for preset '" + std::string(name) + "'");
}

bool outcome_accepted(const PresetExpectation& expect, const Outcome& got) {
  return std::find(expect.outcomes.begin(), expect.outcomes.end(), got.kind) != expect.outcomes.end();
}

bool event_time_accepted(const PresetExpectation& expect, const Outcome& got, double t_max, double rel_tol) {
  if (!expect.event_time) return true;
  const double lo = *expect.event_time * (1.0 - rel_tol);
  const double hi = std::min(*expect.event_time * (1.0 + rel_tol), t_max);
  return got.t_end >= lo - 1e-9 && got.t_end <= hi + 1e-9;
}

}  // namespace asym_pe
