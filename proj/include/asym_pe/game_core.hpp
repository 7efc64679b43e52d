#pragma once

// Domain types and discrete-time dynamics for the pursuer / evader / moving
// obstacle game. Both players move at constant speed with heading control;
// the obstacle translates at a constant velocity that the pursuer only knows
// nominally.

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace asym_pe {

using Vec2 = Eigen::Vector2d;

/// Which obstacle-velocity parameters the pursuer treats as uncertain.
enum class UncertaintySpec { BothCartesian, Rho1Only, Rho2Only, SpeedOnly, HeadingOnly };

enum class EvaderMode { Original, Deceptive };

enum class OutcomeKind { Capture, PursuerCollision, EvaderCollision, Timeout };

std::string_view to_string(UncertaintySpec spec);
std::string_view to_string(EvaderMode mode);
std::string_view to_string(OutcomeKind kind);
std::optional<UncertaintySpec> parse_uncertainty_spec(std::string_view text);
std::optional<EvaderMode> parse_evader_mode(std::string_view text);
std::optional<OutcomeKind> parse_outcome_kind(std::string_view text);

/// Number of parameter columns in the constraint-sensitivity row.
int parameter_count(UncertaintySpec spec);

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Positive semidefinite weight on vec(S_gamma). A scalar q stands for q * I
/// of whatever dimension the uncertainty selection implies.
class RiskWeight {
 public:
  RiskWeight() = default;
  static RiskWeight scalar(double q);
  static RiskWeight matrix(Eigen::MatrixXd q);

  bool is_scalar() const { return !full_.has_value(); }
  double scalar_value() const { return scalar_; }
  const Eigen::MatrixXd& matrix_value() const { return *full_; }

  /// k x k matrix form.
  Eigen::MatrixXd resolve(int k) const;
  /// w^T Q w for a row of length k.
  double quadratic_form(const Eigen::RowVectorXd& w) const;

  friend bool operator==(const RiskWeight& a, const RiskWeight& b);

 private:
  double scalar_ = 0.0;
  std::optional<Eigen::MatrixXd> full_;
};

struct ScenarioConfig {
  Vec2 pursuer_start = Vec2::Zero();
  Vec2 evader_start = Vec2::Zero();
  Vec2 obstacle_start = Vec2::Zero();
  double u_c = 1.0;
  double v_c = 0.6;
  double epsilon = 0.3;
  double r_o = 0.75;
  Vec2 rho_nominal = Vec2::Zero();
  Vec2 rho_true = Vec2::Zero();
  UncertaintySpec uncertainty_spec = UncertaintySpec::BothCartesian;
  int N = 10;
  double dt = 0.1;
  RiskWeight Q;
  double alpha_o = 0.0;
  double alpha_d = 1.0;
  EvaderMode evader_mode = EvaderMode::Original;
  double t_max = 10.0;
  std::uint64_t seed = 0;
  // Multiplies the raw constraint value before it enters the relevance
  // function. 1.0 reproduces the unscaled behaviour.
  double relevance_scale = 1.0;

  friend bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);
};

/// Throws ValidationError naming the first violated invariant.
void validate(const ScenarioConfig& cfg);

struct GameState {
  double t = 0.0;
  Vec2 x_p = Vec2::Zero();
  Vec2 x_e = Vec2::Zero();
  Vec2 x_w_true = Vec2::Zero();
  Vec2 x_w_nominal = Vec2::Zero();
};

GameState initial_state(const ScenarioConfig& cfg);

/// Heading sequence of one player over the horizon. The speed is fixed, so
/// the implied velocity always has norm `speed`.
struct ControlSequence {
  std::vector<double> headings;
  double speed = 0.0;

  std::size_t size() const { return headings.size(); }
  Vec2 velocity(std::size_t i) const;

  static ControlSequence constant(double heading, double speed, int n);
};

/// Euclidean norm of the difference of the stacked implied velocity vectors.
double sequence_distance(const ControlSequence& a, const ControlSequence& b);

/// Previous plan advanced by one step with the last heading repeated.
ControlSequence shift_and_hold(const ControlSequence& seq);

double wrap_angle(double angle);

struct Outcome {
  OutcomeKind kind = OutcomeKind::Timeout;
  double t_end = 0.0;
};

GameState step_state(const GameState& s, double u_head, double v_head, const ScenarioConfig& cfg);

/// r_o^2 - |x - x_w|^2. Non-positive means the position is clear of the obstacle.
double constraint_g(const Vec2& x, const Vec2& x_w, double r_o);

/// Tested against the true obstacle only. Priority when several events hold at
/// the same sample: PursuerCollision, Capture, EvaderCollision, Timeout.
std::optional<Outcome> check_termination(const GameState& s, const ScenarioConfig& cfg);

}  // namespace asym_pe
