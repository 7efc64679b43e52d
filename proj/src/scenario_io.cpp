#include "asym_pe/scenario_io.hpp"

#include "asym_pe/presets.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace asym_pe {
namespace {

int line_of(const YAML::Node& node) { return node.Mark().is_null() ? 0 : node.Mark().line + 1; }

[[noreturn]] void bad(const YAML::Node& node, const std::string& key, const std::string& what) {
  throw ParseError(what, line_of(node), key);
}

double as_double(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) bad(node, key, "expected a number");
  try {
    return node.as<double>();
  } catch (const YAML::Exception&) {
    bad(node, key, "expected a number, got '" + node.Scalar() + "'");
  }
}

Vec2 as_vec2(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence() || node.size() != 2) bad(node, key, "expected a 2-vector [a, b]");
  return Vec2(as_double(node[0], key), as_double(node[1], key));
}

std::string as_word(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) bad(node, key, "expected a name");
  return node.Scalar();
}

RiskWeight as_weight(const YAML::Node& node, const std::string& key) {
  if (node.IsScalar()) return RiskWeight::scalar(as_double(node, key));
  if (!node.IsSequence() || node.size() == 0) bad(node, key, "expected a scalar or a square matrix");
  const auto n = static_cast<Eigen::Index>(node.size());
  Eigen::MatrixXd q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const YAML::Node row = node[static_cast<std::size_t>(i)];
    if (!row.IsSequence() || static_cast<Eigen::Index>(row.size()) != n) bad(row, key, "matrix rows must be square");
    for (Eigen::Index j = 0; j < n; ++j) q(i, j) = as_double(row[static_cast<std::size_t>(j)], key);
  }
  return RiskWeight::matrix(std::move(q));
}

template <typename Int>
Int as_integer(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) bad(node, key, "expected an integer");
  try {
    return node.as<Int>();
  } catch (const YAML::Exception&) {
    bad(node, key, "expected an integer, got '" + node.Scalar() + "'");
  }
}

const std::set<std::string>& required_without_preset() {
  static const std::set<std::string> keys = {"pursuer_start", "evader_start", "obstacle_start", "u_c", "v_c",
                                             "epsilon",       "r_o",          "rho_nominal",    "rho_true",
                                             "N",             "dt"};
  return keys;
}

std::string vec_text(const Vec2& v) { return "[" + format_double(v.x()) + ", " + format_double(v.y()) + "]"; }

}  // namespace

ParseError::ParseError(const std::string& what, int line, std::string key)
    : std::runtime_error(
          (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
          (key.empty() ? std::string() : "key '" + key + "': ") + what),
      line_(line),
      key_(std::move(key)) {}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

ScenarioConfig parse_scenario(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ParseError(e.msg, e.mark.is_null() ? 0 : e.mark.line + 1, "");
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ParseError("scenario must be a mapping of keys to values", line_of(root), "");

  ScenarioConfig cfg;
  bool from_preset = false;
  if (const YAML::Node p = root["preset"]) {
    const std::string name = as_word(p, "preset");
    try {
      cfg = preset(name);
    } catch (const std::out_of_range&) {
      bad(p, "preset", "unknown preset '" + name + "'");
    }
    from_preset = true;
  }

  std::set<std::string> seen;
  std::optional<double> rho_speed;
  std::optional<double> nominal_heading_deg;
  std::optional<double> true_heading_deg;
  YAML::Node polar_anchor;

  for (const auto& entry : root) {
    const std::string key = entry.first.Scalar();
    const YAML::Node& value = entry.second;
    if (!seen.insert(key).second) bad(entry.first, key, "duplicate key");

    if (key == "preset") continue;
    if (key == "pursuer_start") cfg.pursuer_start = as_vec2(value, key);
    else if (key == "evader_start") cfg.evader_start = as_vec2(value, key);
    else if (key == "obstacle_start") cfg.obstacle_start = as_vec2(value, key);
    else if (key == "u_c") cfg.u_c = as_double(value, key);
    else if (key == "v_c") cfg.v_c = as_double(value, key);
    else if (key == "epsilon") cfg.epsilon = as_double(value, key);
    else if (key == "r_o") cfg.r_o = as_double(value, key);
    else if (key == "rho_nominal") cfg.rho_nominal = as_vec2(value, key);
    else if (key == "rho_true") cfg.rho_true = as_vec2(value, key);
    else if (key == "rho_speed") {
      rho_speed = as_double(value, key);
      polar_anchor = entry.first;
    } else if (key == "rho_nominal_heading_deg") {
      nominal_heading_deg = as_double(value, key);
      polar_anchor = entry.first;
    } else if (key == "rho_true_heading_deg") {
      true_heading_deg = as_double(value, key);
      polar_anchor = entry.first;
    } else if (key == "uncertainty_spec") {
      const auto spec = parse_uncertainty_spec(as_word(value, key));
      if (!spec) bad(value, key, "unknown uncertainty spec '" + value.Scalar() + "'");
      cfg.uncertainty_spec = *spec;
    } else if (key == "N") cfg.N = as_integer<int>(value, key);
    else if (key == "dt") cfg.dt = as_double(value, key);
    else if (key == "Q") cfg.Q = as_weight(value, key);
    else if (key == "alpha_o") cfg.alpha_o = as_double(value, key);
    else if (key == "alpha_d") cfg.alpha_d = as_double(value, key);
    else if (key == "evader_mode") {
      const auto mode = parse_evader_mode(as_word(value, key));
      if (!mode) bad(value, key, "unknown evader mode '" + value.Scalar() + "'");
      cfg.evader_mode = *mode;
    } else if (key == "t_max") cfg.t_max = as_double(value, key);
    else if (key == "seed") cfg.seed = as_integer<std::uint64_t>(value, key);
    else if (key == "relevance_scale") cfg.relevance_scale = as_double(value, key);
    else bad(entry.first, key, "unknown key");
  }

  if (nominal_heading_deg || true_heading_deg) {
    if (!rho_speed) bad(polar_anchor, "rho_speed", "polar obstacle headings need rho_speed");
    auto polar = [&](double deg) {
      const double a = deg * std::numbers::pi / 180.0;
      return Vec2(*rho_speed * std::cos(a), *rho_speed * std::sin(a));
    };
    if (nominal_heading_deg) {
      if (seen.count("rho_nominal")) bad(polar_anchor, "rho_nominal_heading_deg", "conflicts with rho_nominal");
      cfg.rho_nominal = polar(*nominal_heading_deg);
      seen.insert("rho_nominal");
    }
    if (true_heading_deg) {
      if (seen.count("rho_true")) bad(polar_anchor, "rho_true_heading_deg", "conflicts with rho_true");
      cfg.rho_true = polar(*true_heading_deg);
      seen.insert("rho_true");
    }
  } else if (rho_speed) {
    bad(polar_anchor, "rho_speed", "rho_speed needs rho_nominal_heading_deg or rho_true_heading_deg");
  }

  if (!from_preset) {
    for (const auto& key : required_without_preset()) {
      if (!seen.count(key)) throw ValidationError("missing required key '" + key + "' (no preset given)");
    }
  }
  validate(cfg);
  return cfg;
}

std::string serialize_scenario(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "pursuer_start: " << vec_text(cfg.pursuer_start) << "\n";
  os << "evader_start: " << vec_text(cfg.evader_start) << "\n";
  os << "obstacle_start: " << vec_text(cfg.obstacle_start) << "\n";
  os << "u_c: " << format_double(cfg.u_c) << "\n";
  os << "v_c: " << format_double(cfg.v_c) << "\n";
  os << "epsilon: " << format_double(cfg.epsilon) << "\n";
  os << "r_o: " << format_double(cfg.r_o) << "\n";
  os << "rho_nominal: " << vec_text(cfg.rho_nominal) << "\n";
  os << "rho_true: " << vec_text(cfg.rho_true) << "\n";
  os << "uncertainty_spec: " << to_string(cfg.uncertainty_spec) << "\n";
  os << "N: " << cfg.N << "\n";
  os << "dt: " << format_double(cfg.dt) << "\n";
  if (cfg.Q.is_scalar()) {
    os << "Q: " << format_double(cfg.Q.scalar_value()) << "\n";
  } else {
    const auto& q = cfg.Q.matrix_value();
    os << "Q: [";
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      os << (i ? ", [" : "[");
      for (Eigen::Index j = 0; j < q.cols(); ++j) os << (j ? ", " : "") << format_double(q(i, j));
      os << "]";
    }
    os << "]\n";
  }
  os << "alpha_o: " << format_double(cfg.alpha_o) << "\n";
  os << "alpha_d: " << format_double(cfg.alpha_d) << "\n";
  os << "evader_mode: " << to_string(cfg.evader_mode) << "\n";
  os << "t_max: " << format_double(cfg.t_max) << "\n";
  os << "seed: " << cfg.seed << "\n";
  os << "relevance_scale: " << format_double(cfg.relevance_scale) << "\n";
  return os.str();
}

}  // namespace asym_pe
