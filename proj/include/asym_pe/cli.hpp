#pragma once

#include "asym_pe/game_core.hpp"

#include <iosfwd>
#include <string>
#include <string_view>

namespace asym_pe {

/// A preset name or the path of a scenario file. ASYM_PE_SEED, when set,
/// replaces the seed.
ScenarioConfig load_scenario(const std::string& name_or_path);

/// Overrides one numeric field by its scenario key, e.g. ("Q", 2.5).
/// Throws std::invalid_argument for keys that are not numeric scalars.
void set_scalar_field(ScenarioConfig& cfg, std::string_view key, double value);

/// Entry point behind the asym_pe_cli executable. Returns the exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace asym_pe
