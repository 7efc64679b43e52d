#pragma once

// Scenario documents: a YAML mapping whose keys mirror ScenarioConfig.
//
//   preset: fig3_desensitized   # optional, applied first
//   Q: 0.5                      # scalar shorthand for Q * I, or [[a, b], [b, c]]
//   rho_true: [0, -0.4]
//
// Obstacle velocities may instead be given in polar form with
// `rho_speed`, `rho_nominal_heading_deg` and `rho_true_heading_deg`.

#include "asym_pe/game_core.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace asym_pe {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, std::string key);
  int line() const { return line_; }  // 1-based, 0 when unknown
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

/// Throws ParseError for malformed text or unknown keys and ValidationError
/// when the resulting config violates an invariant.
ScenarioConfig parse_scenario(std::string_view text);

/// Emits every field explicitly, with shortest round-trip decimals, so that
/// parse_scenario(serialize_scenario(c)) == c.
std::string serialize_scenario(const ScenarioConfig& cfg);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace asym_pe
