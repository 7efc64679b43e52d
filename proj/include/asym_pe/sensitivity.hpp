#pragma once

// Constraint-sensitivity machinery for the pursuer's obstacle constraint.
//
// The constraint g = r_o^2 - |x_p - x_w|^2 depends on the obstacle velocity
// rho through x_w(t) = x_w0 + rho * t. Its sensitivity row S_g is weighted by
// a relevance factor that peaks near the constraint boundary, giving the
// relevant constraint sensitivity S_gamma. The risk of a plan is the sum of
// |vec S_gamma|_Q^2 over its horizon samples.

#include "asym_pe/game_core.hpp"

#include <Eigen/Core>

#include <functional>
#include <span>
#include <vector>

namespace asym_pe {

/// Logistic derivative s(z)(1 - s(z)) for z <= 0, held at 0.25 for z > 0.
double relevance(double z);

/// dg/drho at the nominal obstacle: 2t (x_p - x_w).
Eigen::RowVector2d constraint_sensitivity_cartesian(const Vec2& x_p, const Vec2& x_w_nominal, double t);

enum class PolarParameter { Speed, Heading };

/// dg/d|rho| or dg/dpsi for a rho parameterised by speed and heading psi.
double constraint_sensitivity_polar(const Vec2& x_p, const Vec2& x_w_nominal, double t, double rho_norm,
                                    double psi, PolarParameter which);

/// S_g restricted to the parameter columns selected by cfg.uncertainty_spec.
Eigen::RowVectorXd constraint_sensitivity(const Vec2& x_p, const Vec2& x_w_nominal, double t,
                                          const ScenarioConfig& cfg);

struct RcsSample {
  Eigen::RowVectorXd s_g;
  double relevance = 0.0;
  Eigen::RowVectorXd s_gamma;
  double weighted_norm_sq = 0.0;
};

RcsSample rcs_sample(const Vec2& x_p, const Vec2& x_w_nominal, double t, const ScenarioConfig& cfg);

/// Only the weighted norm of rcs_sample, without allocating the rows.
double rcs_weighted_norm_sq(const Vec2& x_p, const Vec2& x_w_nominal, double t, const ScenarioConfig& cfg);

/// Sum of weighted_norm_sq over the horizon samples.
double risk_of_sequence(std::span<const RcsSample> samples);

// ---------------------------------------------------------------------------
// Sensitivity equation  dS/dt = A(t) S + B(t),  S(t0) = 0.

struct SensitivityMatrix {
  Eigen::MatrixXd entries;
  double t = 0.0;
};

/// Jacobians of the dynamics along the nominal trajectory.
struct LinearizedDynamics {
  int state_dim = 0;
  int param_dim = 0;
  std::function<Eigen::MatrixXd(double t)> state_jacobian;  // A(t), state_dim x state_dim
  std::function<Eigen::MatrixXd(double t)> param_jacobian;  // B(t), state_dim x param_dim
};

enum class OdeMethod {
  // Treats A and B as constant over each step; exact when A == 0.
  ExactLinear,
  Rk4,
};

/// Returns S at t0, t0 + dt, ..., t0 + steps * dt.
std::vector<SensitivityMatrix> integrate_sensitivity(const LinearizedDynamics& dyn, double t0, double dt,
                                                     int steps, OdeMethod method, int rk4_substeps = 8);

/// Sensitivity of the stacked state (x_p, x_e, x_w) to the Cartesian obstacle
/// velocity along the rollout of the two heading sequences. Rows 0-1 are the
/// pursuer, 2-3 the evader, 4-5 the obstacle.
std::vector<SensitivityMatrix> propagate_sensitivity_ode(const ScenarioConfig& cfg, const ControlSequence& u_seq,
                                                         const ControlSequence& v_seq,
                                                         OdeMethod method = OdeMethod::ExactLinear,
                                                         double t0 = 0.0);

/// dg/dx for the stacked state, evaluated at (x_p, x_w).
Eigen::RowVectorXd constraint_state_gradient(const Vec2& x_p, const Vec2& x_w);

// ---------------------------------------------------------------------------
// RCS field over candidate pursuer positions.

struct GridSpec {
  double x1_min = 0.0;
  double x1_max = 0.0;
  double x2_min = 0.0;
  double x2_max = 0.0;
  int resolution = 0;  // points per axis
};

struct FieldGrid {
  std::vector<double> x1;
  std::vector<double> x2;
  // values(i, j) belongs to (x1[i], x2[j]).
  Eigen::MatrixXd values;
};

/// |S_gamma|_2 at every grid point against the nominal obstacle at time t.
/// Throws std::invalid_argument for fewer than two points per axis or an
/// empty extent.
FieldGrid rcs_field_grid(const ScenarioConfig& cfg, double t, const GridSpec& grid);

}  // namespace asym_pe
