#pragma once

#include "asym_pe/sensitivity.hpp"
#include "asym_pe/sim_engine.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace asym_pe {

inline constexpr std::string_view kTraceHeader = "t,xp1,xp2,xe1,xe2,xw_true1,xw_true2,xw_nom1,xw_nom2,u_head,v_head,risk";
inline constexpr std::string_view kFieldHeader = "x1,x2,rcs_norm";

/// Header, one row per record, then `# outcome=<kind>,t_end=<t>`. Numbers are
/// shortest round-trip decimals; the terminal row carries nan headings.
std::string write_trace_csv(const SimulationTrace& trace);

struct ParsedTrace {
  std::vector<StepRecord> records;  // state, headings and risk only
  Outcome outcome;
};

/// Inverse of write_trace_csv. Throws std::runtime_error on malformed input.
ParsedTrace read_trace_csv(std::string_view text);

/// One row per grid point, x1 outer and x2 inner.
std::string write_field_csv(const FieldGrid& field);

/// One line per run: `<index>,<label>,<outcome>,<t_end>`.
std::string write_outcome_table(const std::vector<std::string>& labels, const std::vector<SimulationTrace>& traces);

}  // namespace asym_pe
