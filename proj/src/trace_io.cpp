#include "asym_pe/trace_io.hpp"

#include "asym_pe/scenario_io.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace asym_pe {
namespace {

double parse_number(std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw std::runtime_error("trace csv line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string write_trace_csv(const SimulationTrace& trace) {
  std::ostringstream os;
  os << kTraceHeader << "\n";
  for (const auto& r : trace.records) {
    const auto& s = r.state;
    const double values[] = {s.t,           s.x_p.x(),         s.x_p.y(),         s.x_e.x(),
                             s.x_e.y(),     s.x_w_true.x(),    s.x_w_true.y(),    s.x_w_nominal.x(),
                             s.x_w_nominal.y(), r.u_head,      r.v_head,          r.risk};
    bool first = true;
    for (double v : values) {
      os << (first ? "" : ",") << format_double(v);
      first = false;
    }
    os << "\n";
  }
  os << "# outcome=" << to_string(trace.outcome.kind) << ",t_end=" << format_double(trace.outcome.t_end) << "\n";
  return os.str();
}

ParsedTrace read_trace_csv(std::string_view text) {
  ParsedTrace out;
  bool header_seen = false;
  bool outcome_seen = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;

    if (!header_seen) {
      if (line != kTraceHeader) throw std::runtime_error("trace csv: unexpected header");
      header_seen = true;
      continue;
    }
    if (line.starts_with("# outcome=")) {
      const auto parts = split(line.substr(10), ',');
      if (parts.size() != 2 || !parts[1].starts_with("t_end=")) {
        throw std::runtime_error("trace csv line " + std::to_string(line_no) + ": bad outcome line");
      }
      const auto kind = parse_outcome_kind(parts[0]);
      if (!kind) throw std::runtime_error("trace csv: unknown outcome '" + std::string(parts[0]) + "'");
      out.outcome = Outcome{*kind, parse_number(parts[1].substr(6), line_no)};
      outcome_seen = true;
      continue;
    }
    if (outcome_seen) throw std::runtime_error("trace csv: rows after the outcome line");

    const auto fields = split(line, ',');
    if (fields.size() != 12) {
      throw std::runtime_error("trace csv line " + std::to_string(line_no) + ": expected 12 columns");
    }
    double v[12];
    for (std::size_t i = 0; i < 12; ++i) v[i] = parse_number(fields[i], line_no);
    StepRecord r;
    r.state.t = v[0];
    r.state.x_p = Vec2(v[1], v[2]);
    r.state.x_e = Vec2(v[3], v[4]);
    r.state.x_w_true = Vec2(v[5], v[6]);
    r.state.x_w_nominal = Vec2(v[7], v[8]);
    r.u_head = v[9];
    r.v_head = v[10];
    r.risk = v[11];
    out.records.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("trace csv: missing header");
  if (!outcome_seen) throw std::runtime_error("trace csv: missing outcome line");
  return out;
}

std::string write_field_csv(const FieldGrid& field) {
  std::ostringstream os;
  os << kFieldHeader << "\n";
  for (std::size_t i = 0; i < field.x1.size(); ++i) {
    for (std::size_t j = 0; j < field.x2.size(); ++j) {
      os << format_double(field.x1[i]) << "," << format_double(field.x2[j]) << ","
         << format_double(field.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << "\n";
    }
  }
  return os.str();
}

std::string write_outcome_table(const std::vector<std::string>& labels, const std::vector<SimulationTrace>& traces) {
  std::ostringstream os;
  os << "index,label,outcome,t_end\n";
  for (std::size_t i = 0; i < traces.size(); ++i) {
    os << i << "," << (i < labels.size() ? labels[i] : std::string()) << "," << to_string(traces[i].outcome.kind)
       << "," << format_double(traces[i].outcome.t_end) << "\n";
  }
  return os.str();
}

}  // namespace asym_pe
