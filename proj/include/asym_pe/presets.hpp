#pragma once

#include "asym_pe/game_core.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace asym_pe {

/// Names of the built-in scenarios, in registry order.
const std::vector<std::string_view>& preset_names();

/// Throws std::out_of_range for an unknown name.
ScenarioConfig preset(std::string_view name);

/// Reference outcome of a preset and the reported event time, if any.
struct PresetExpectation {
  std::string_view name;
  // Accepted outcomes; "no capture" presets list several.
  std::vector<OutcomeKind> outcomes;
  std::optional<double> event_time;
};

const std::vector<PresetExpectation>& preset_expectations();

/// Throws std::out_of_range for an unknown name.
const PresetExpectation& preset_expectation(std::string_view name);

/// Relative tolerance on reported event times.
inline constexpr double kEventTimeTolerance = 0.25;

bool outcome_accepted(const PresetExpectation& expect, const Outcome& got);

/// True when there is no reference time. Bounds are clipped to t_max, so a
/// reference at the cutoff means "by the cutoff".
bool event_time_accepted(const PresetExpectation& expect, const Outcome& got, double t_max,
                         double rel_tol = kEventTimeTolerance);

}  // namespace asym_pe
