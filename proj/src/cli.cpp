#include "asym_pe/cli.hpp"

#include "asym_pe/presets.hpp"
#include "asym_pe/scenario_io.hpp"
#include "asym_pe/sensitivity.hpp"
#include "asym_pe/sim_engine.hpp"
#include "asym_pe/trace_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace asym_pe {
namespace {

namespace fs = std::filesystem;

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument(std::string(what) + ": '" + std::string(text) + "' is not a number");
  }
  return v;
}

std::vector<std::string_view> split_commas(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(',', start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

GridSpec parse_grid(std::string_view text) {
  const auto parts = split_commas(text);
  if (parts.size() != 5) throw std::invalid_argument("--grid expects x1min,x1max,x2min,x2max,res");
  GridSpec g;
  g.x1_min = parse_double(parts[0], "--grid");
  g.x1_max = parse_double(parts[1], "--grid");
  g.x2_min = parse_double(parts[2], "--grid");
  g.x2_max = parse_double(parts[3], "--grid");
  const double res = parse_double(parts[4], "--grid");
  if (res != static_cast<int>(res)) throw std::invalid_argument("--grid resolution must be an integer");
  g.resolution = static_cast<int>(res);
  return g;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string summary_line(const SimulationTrace& trace) {
  std::ostringstream os;
  os << "outcome=" << to_string(trace.outcome.kind) << " t_end=" << format_double(trace.outcome.t_end)
     << " steps=" << (trace.records.empty() ? 0 : trace.records.size() - 1)
     << " warnings=" << trace.warnings.size();
  return os.str();
}

int cmd_run(const std::string& scenario, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  const ScenarioConfig cfg = load_scenario(scenario);
  const SimulationTrace trace = run(cfg);
  for (const auto& w : trace.warnings) err << "warning: " << w << "\n";
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(fs::path(out_dir) / "trace.csv", write_trace_csv(trace));
    write_file(fs::path(out_dir) / "scenario.yaml", serialize_scenario(cfg));
  }
  out << summary_line(trace) << "\n";
  return 0;
}

int cmd_field(const std::string& scenario, double t, const std::string& grid_text, const std::string& out_file,
              std::ostream& out) {
  const ScenarioConfig cfg = load_scenario(scenario);
  const FieldGrid field = rcs_field_grid(cfg, t, parse_grid(grid_text));
  const std::string csv = write_field_csv(field);
  if (out_file.empty()) {
    out << csv;
  } else {
    write_file(out_file, csv);
  }
  return 0;
}

int cmd_sweep(const std::string& scenario, const std::string& vary, std::ostream& out) {
  const auto eq = vary.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == vary.size()) {
    throw std::invalid_argument("--vary expects key=v1,v2,...");
  }
  const std::string key = vary.substr(0, eq);
  const ScenarioConfig base = load_scenario(scenario);
  std::vector<ScenarioConfig> cfgs;
  std::vector<std::string> labels;
  for (auto part : split_commas(std::string_view(vary).substr(eq + 1))) {
    ScenarioConfig c = base;
    set_scalar_field(c, key, parse_double(part, "--vary"));
    validate(c);
    cfgs.push_back(std::move(c));
    labels.push_back(key + "=" + std::string(part));
  }
  const auto traces = run_batch(cfgs);
  out << write_outcome_table(labels, traces);
  return 0;
}

int cmd_verify(std::ostream& out) {
  std::vector<ScenarioConfig> cfgs;
  for (auto name : preset_names()) cfgs.push_back(preset(name));
  const auto traces = run_batch(cfgs);
  bool all_ok = true;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& expect = preset_expectation(preset_names()[i]);
    const bool outcome_ok = outcome_accepted(expect, traces[i].outcome);
    const bool time_ok = event_time_accepted(expect, traces[i].outcome, cfgs[i].t_max);
    all_ok = all_ok && outcome_ok && time_ok;
    out << (outcome_ok && time_ok ? "PASS " : "FAIL ") << expect.name << " " << summary_line(traces[i]);
    out << " expected=";
    for (std::size_t k = 0; k < expect.outcomes.size(); ++k) out << (k ? "|" : "") << to_string(expect.outcomes[k]);
    if (expect.event_time) out << "@" << format_double(*expect.event_time);
    out << "\n";
  }
  return all_ok ? 0 : 1;
}

}  // namespace

ScenarioConfig load_scenario(const std::string& name_or_path) {
  ScenarioConfig cfg;
  const auto& names = preset_names();
  if (fs::is_regular_file(name_or_path)) {
    cfg = parse_scenario(read_file(name_or_path));
  } else if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
    cfg = preset(name_or_path);
  } else {
    throw std::runtime_error("'" + name_or_path + "' is neither a scenario file nor a preset name");
  }
  if (const char* seed = std::getenv("ASYM_PE_SEED"); seed && *seed) {
    std::uint64_t v = 0;
    const std::string_view s(seed);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw std::invalid_argument("ASYM_PE_SEED must be an unsigned integer");
    }
    cfg.seed = v;
  }
  return cfg;
}

void set_scalar_field(ScenarioConfig& cfg, std::string_view key, double value) {
  if (key == "Q") cfg.Q = RiskWeight::scalar(value);
  else if (key == "u_c") cfg.u_c = value;
  else if (key == "v_c") cfg.v_c = value;
  else if (key == "epsilon") cfg.epsilon = value;
  else if (key == "r_o") cfg.r_o = value;
  else if (key == "dt") cfg.dt = value;
  else if (key == "alpha_o") cfg.alpha_o = value;
  else if (key == "alpha_d") cfg.alpha_d = value;
  else if (key == "t_max") cfg.t_max = value;
  else if (key == "relevance_scale") cfg.relevance_scale = value;
  else if (key == "N" || key == "seed") {
    if (value < 0 || value != static_cast<double>(static_cast<long long>(value))) {
      throw std::invalid_argument(std::string(key) + " must be a non-negative integer");
    }
    if (key == "N") cfg.N = static_cast<int>(value);
    else cfg.seed = static_cast<std::uint64_t>(value);
  } else {
    throw std::invalid_argument("cannot vary '" + std::string(key) + "'");
  }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Receding-horizon pursuit-evasion with an uncertain moving obstacle"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "simulate a scenario and print the outcome");
  run_cmd->add_option("scenario", scenario, "preset name or scenario file")->required();
  run_cmd->add_option("--out", out_dir, "directory for trace.csv and scenario.yaml");

  double field_t = 0.0;
  std::string grid_text;
  std::string field_out;
  auto* field_cmd = app.add_subcommand("field", "RCS norm on a grid, as CSV");
  field_cmd->add_option("scenario", scenario, "preset name or scenario file")->required();
  field_cmd->add_option("--t", field_t, "game time")->required();
  field_cmd->add_option("--grid", grid_text, "x1min,x1max,x2min,x2max,res")->required();
  field_cmd->add_option("--out", field_out, "output file (default stdout)");

  std::string vary;
  auto* sweep_cmd = app.add_subcommand("sweep", "run a scenario over values of one field");
  sweep_cmd->add_option("scenario", scenario, "preset name or scenario file")->required();
  sweep_cmd->add_option("--vary", vary, "key=v1,v2,...")->required();

  auto* presets_cmd = app.add_subcommand("presets", "list built-in scenarios");
  auto* verify_cmd = app.add_subcommand("verify", "run every preset against its reference outcome");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (run_cmd->parsed()) return cmd_run(scenario, out_dir, out, err);
    if (field_cmd->parsed()) return cmd_field(scenario, field_t, grid_text, field_out, out);
    if (sweep_cmd->parsed()) return cmd_sweep(scenario, vary, out);
    if (presets_cmd->parsed()) {
      for (auto name : preset_names()) out << name << "\n";
      return 0;
    }
    if (verify_cmd->parsed()) return cmd_verify(out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace asym_pe
