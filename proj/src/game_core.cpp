#include "asym_pe/game_core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace asym_pe {
namespace {

// Slack on the cutoff comparison, for times that are not on the dt grid.
constexpr double kTimeSlack = 1e-9;

template <typename Enum, std::size_t M>
std::optional<Enum> lookup(const std::pair<std::string_view, Enum> (&table)[M], std::string_view text) {
  for (const auto& [name, value] : table) {
    if (name == text) return value;
  }
  return std::nullopt;
}

constexpr std::pair<std::string_view, UncertaintySpec> kSpecNames[] = {
    {"BothCartesian", UncertaintySpec::BothCartesian}, {"Rho1Only", UncertaintySpec::Rho1Only},
    {"Rho2Only", UncertaintySpec::Rho2Only},           {"SpeedOnly", UncertaintySpec::SpeedOnly},
    {"HeadingOnly", UncertaintySpec::HeadingOnly},
};
constexpr std::pair<std::string_view, EvaderMode> kModeNames[] = {
    {"Original", EvaderMode::Original},
    {"Deceptive", EvaderMode::Deceptive},
};
constexpr std::pair<std::string_view, OutcomeKind> kOutcomeNames[] = {
    {"Capture", OutcomeKind::Capture},
    {"PursuerCollision", OutcomeKind::PursuerCollision},
    {"EvaderCollision", OutcomeKind::EvaderCollision},
    {"Timeout", OutcomeKind::Timeout},
};

template <typename Enum, std::size_t M>
std::string_view name_of(const std::pair<std::string_view, Enum> (&table)[M], Enum value) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

bool finite(const Vec2& v) { return std::isfinite(v.x()) && std::isfinite(v.y()); }

[[noreturn]] void fail(const std::string& what) { throw ValidationError(what); }

}  // namespace

std::string_view to_string(UncertaintySpec spec) { return name_of(kSpecNames, spec); }
std::string_view to_string(EvaderMode mode) { return name_of(kModeNames, mode); }
std::string_view to_string(OutcomeKind kind) { return name_of(kOutcomeNames, kind); }
std::optional<UncertaintySpec> parse_uncertainty_spec(std::string_view text) { return lookup(kSpecNames, text); }
std::optional<EvaderMode> parse_evader_mode(std::string_view text) { return lookup(kModeNames, text); }
std::optional<OutcomeKind> parse_outcome_kind(std::string_view text) { return lookup(kOutcomeNames, text); }

int parameter_count(UncertaintySpec spec) { return spec == UncertaintySpec::BothCartesian ? 2 : 1; }

RiskWeight RiskWeight::scalar(double q) {
  RiskWeight w;
  w.scalar_ = q;
  return w;
}

RiskWeight RiskWeight::matrix(Eigen::MatrixXd q) {
  RiskWeight w;
  w.full_ = std::move(q);
  return w;
}

Eigen::MatrixXd RiskWeight::resolve(int k) const {
  if (full_) return *full_;
  return scalar_ * Eigen::MatrixXd::Identity(k, k);
}

double RiskWeight::quadratic_form(const Eigen::RowVectorXd& w) const {
  if (!full_) return scalar_ * w.squaredNorm();
  return (w * (*full_) * w.transpose())(0, 0);
}

bool operator==(const RiskWeight& a, const RiskWeight& b) {
  if (a.is_scalar() != b.is_scalar()) return false;
  if (a.is_scalar()) return a.scalar_ == b.scalar_;
  const auto& ma = *a.full_;
  const auto& mb = *b.full_;
  return ma.rows() == mb.rows() && ma.cols() == mb.cols() && ma == mb;
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  return a.pursuer_start == b.pursuer_start && a.evader_start == b.evader_start &&
         a.obstacle_start == b.obstacle_start && a.u_c == b.u_c && a.v_c == b.v_c && a.epsilon == b.epsilon &&
         a.r_o == b.r_o && a.rho_nominal == b.rho_nominal && a.rho_true == b.rho_true &&
         a.uncertainty_spec == b.uncertainty_spec && a.N == b.N && a.dt == b.dt && a.Q == b.Q &&
         a.alpha_o == b.alpha_o && a.alpha_d == b.alpha_d && a.evader_mode == b.evader_mode &&
         a.t_max == b.t_max && a.seed == b.seed && a.relevance_scale == b.relevance_scale;
}

void validate(const ScenarioConfig& cfg) {
  if (!finite(cfg.pursuer_start) || !finite(cfg.evader_start) || !finite(cfg.obstacle_start) ||
      !finite(cfg.rho_nominal) || !finite(cfg.rho_true)) {
    fail("positions and obstacle velocities must be finite");
  }
  if (!(cfg.u_c > 0.0) || !(cfg.v_c > 0.0)) fail("player speeds must be positive");
  if (!(cfg.u_c > cfg.v_c)) fail("capturability requires u_c > v_c");
  if (!(cfg.epsilon > 0.0)) fail("capture radius epsilon must be positive");
  if (!(cfg.r_o > 0.0)) fail("obstacle radius r_o must be positive");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) fail("time step dt must be positive");
  if (cfg.N < 1) fail("horizon N must be at least 1");
  if (!(cfg.t_max > 0.0) || !std::isfinite(cfg.t_max)) fail("t_max must be positive");
  if (!std::isfinite(cfg.alpha_o) || !std::isfinite(cfg.alpha_d)) fail("deception weights must be finite");
  if (!(cfg.relevance_scale > 0.0) || !std::isfinite(cfg.relevance_scale)) fail("relevance_scale must be positive");

  const int k = parameter_count(cfg.uncertainty_spec);
  if (cfg.Q.is_scalar()) {
    if (!(cfg.Q.scalar_value() >= 0.0) || !std::isfinite(cfg.Q.scalar_value())) fail("Q must be non-negative");
  } else {
    const Eigen::MatrixXd& q = cfg.Q.matrix_value();
    if (q.rows() != k || q.cols() != k) {
      std::ostringstream os;
      os << "Q must be " << k << "x" << k << " for uncertainty_spec " << to_string(cfg.uncertainty_spec);
      fail(os.str());
    }
    if (!q.allFinite()) fail("Q entries must be finite");
    if ((q - q.transpose()).cwiseAbs().maxCoeff() > 0.0) fail("Q must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
    if (eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff())) {
      fail("Q must be positive semidefinite");
    }
  }

  if (!((cfg.pursuer_start - cfg.obstacle_start).norm() > cfg.r_o)) fail("pursuer starts inside the obstacle");
  if (!((cfg.evader_start - cfg.obstacle_start).norm() > cfg.r_o)) fail("evader starts inside the obstacle");
  if (!((cfg.pursuer_start - cfg.evader_start).norm() > cfg.epsilon)) fail("evader starts inside the capture disk");
}

GameState initial_state(const ScenarioConfig& cfg) {
  GameState s;
  s.t = 0.0;
  s.x_p = cfg.pursuer_start;
  s.x_e = cfg.evader_start;
  s.x_w_true = cfg.obstacle_start;
  s.x_w_nominal = cfg.obstacle_start;
  return s;
}

Vec2 ControlSequence::velocity(std::size_t i) const {
  return speed * Vec2(std::cos(headings[i]), std::sin(headings[i]));
}

ControlSequence ControlSequence::constant(double heading, double speed, int n) {
  return ControlSequence{std::vector<double>(static_cast<std::size_t>(n), heading), speed};
}

double sequence_distance(const ControlSequence& a, const ControlSequence& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sequence_distance: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a.velocity(i) - b.velocity(i)).squaredNorm();
  return std::sqrt(sum);
}

ControlSequence shift_and_hold(const ControlSequence& seq) {
  ControlSequence out = seq;
  if (out.headings.size() > 1) {
    std::move(out.headings.begin() + 1, out.headings.end(), out.headings.begin());
    out.headings.back() = out.headings[out.headings.size() - 2];
  }
  return out;
}

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::remainder(angle, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

GameState step_state(const GameState& s, double u_head, double v_head, const ScenarioConfig& cfg) {
  GameState next;
  // Times on the dt grid stay on it, so long runs do not drift.
  const double k = std::round(s.t / cfg.dt);
  const bool on_grid = cfg.dt > 0.0 && std::abs(s.t - k * cfg.dt) <= 1e-9 * std::max(1.0, std::abs(s.t));
  next.t = on_grid ? (k + 1.0) * cfg.dt : s.t + cfg.dt;
  next.x_p = s.x_p + cfg.u_c * Vec2(std::cos(u_head), std::sin(u_head)) * cfg.dt;
  next.x_e = s.x_e + cfg.v_c * Vec2(std::cos(v_head), std::sin(v_head)) * cfg.dt;
  next.x_w_true = s.x_w_true + cfg.rho_true * cfg.dt;
  next.x_w_nominal = s.x_w_nominal + cfg.rho_nominal * cfg.dt;
  return next;
}

double constraint_g(const Vec2& x, const Vec2& x_w, double r_o) { return r_o * r_o - (x - x_w).squaredNorm(); }

std::optional<Outcome> check_termination(const GameState& s, const ScenarioConfig& cfg) {
  if (constraint_g(s.x_p, s.x_w_true, cfg.r_o) >= 0.0) return Outcome{OutcomeKind::PursuerCollision, s.t};
  if ((s.x_p - s.x_e).norm() <= cfg.epsilon) return Outcome{OutcomeKind::Capture, s.t};
  if (constraint_g(s.x_e, s.x_w_true, cfg.r_o) >= 0.0) return Outcome{OutcomeKind::EvaderCollision, s.t};
  // Stop at the last sample not beyond t_max when dt does not divide it.
  if (s.t >= cfg.t_max - kTimeSlack || s.t + cfg.dt > cfg.t_max + kTimeSlack) {
    return Outcome{OutcomeKind::Timeout, s.t};
  }
  return std::nullopt;
}

}  // namespace asym_pe
