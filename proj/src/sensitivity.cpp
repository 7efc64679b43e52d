#include "asym_pe/sensitivity.hpp"

#include <cmath>
#include <stdexcept>

namespace asym_pe {
namespace {

double nominal_speed(const ScenarioConfig& cfg) { return cfg.rho_nominal.norm(); }
double nominal_heading(const ScenarioConfig& cfg) { return std::atan2(cfg.rho_nominal.y(), cfg.rho_nominal.x()); }

}  // namespace

double relevance(double z) {
  if (z > 0.0) return 0.25;
  // For z <= 0, e^z / (1 + e^z)^2 avoids overflow of e^{-z}.
  const double e = std::exp(z);
  const double d = 1.0 + e;
  return e / (d * d);
}

Eigen::RowVector2d constraint_sensitivity_cartesian(const Vec2& x_p, const Vec2& x_w_nominal, double t) {
  const Vec2 d = x_p - x_w_nominal;
  return Eigen::RowVector2d(2.0 * t * d.x(), 2.0 * t * d.y());
}

double constraint_sensitivity_polar(const Vec2& x_p, const Vec2& x_w_nominal, double t, double rho_norm,
                                    double psi, PolarParameter which) {
  const Vec2 d = x_p - x_w_nominal;
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  if (which == PolarParameter::Speed) return 2.0 * t * (d.y() * s + d.x() * c);
  return 2.0 * rho_norm * t * (d.y() * c - d.x() * s);
}

Eigen::RowVectorXd constraint_sensitivity(const Vec2& x_p, const Vec2& x_w_nominal, double t,
                                          const ScenarioConfig& cfg) {
  switch (cfg.uncertainty_spec) {
    case UncertaintySpec::BothCartesian:
      return constraint_sensitivity_cartesian(x_p, x_w_nominal, t);
    case UncertaintySpec::Rho1Only:
      return Eigen::RowVectorXd::Constant(1, 2.0 * t * (x_p.x() - x_w_nominal.x()));
    case UncertaintySpec::Rho2Only:
      return Eigen::RowVectorXd::Constant(1, 2.0 * t * (x_p.y() - x_w_nominal.y()));
    case UncertaintySpec::SpeedOnly:
      return Eigen::RowVectorXd::Constant(
          1, constraint_sensitivity_polar(x_p, x_w_nominal, t, nominal_speed(cfg), nominal_heading(cfg),
                                          PolarParameter::Speed));
    case UncertaintySpec::HeadingOnly:
      return Eigen::RowVectorXd::Constant(
          1, constraint_sensitivity_polar(x_p, x_w_nominal, t, nominal_speed(cfg), nominal_heading(cfg),
                                          PolarParameter::Heading));
  }
  throw std::logic_error("constraint_sensitivity: unknown uncertainty spec");
}

RcsSample rcs_sample(const Vec2& x_p, const Vec2& x_w_nominal, double t, const ScenarioConfig& cfg) {
  RcsSample out;
  out.s_g = constraint_sensitivity(x_p, x_w_nominal, t, cfg);
  out.relevance = relevance(cfg.relevance_scale * constraint_g(x_p, x_w_nominal, cfg.r_o));
  out.s_gamma = out.relevance * out.s_g;
  out.weighted_norm_sq = cfg.Q.quadratic_form(out.s_gamma);
  return out;
}

double rcs_weighted_norm_sq(const Vec2& x_p, const Vec2& x_w_nominal, double t, const ScenarioConfig& cfg) {
  const double gamma = relevance(cfg.relevance_scale * constraint_g(x_p, x_w_nominal, cfg.r_o));
  if (cfg.Q.is_scalar()) {
    // Same arithmetic as rcs_sample for the scalar weight, minus the heap rows.
    const Vec2 d = x_p - x_w_nominal;
    double sq = 0.0;
    switch (cfg.uncertainty_spec) {
      case UncertaintySpec::BothCartesian: {
        const double a = gamma * (2.0 * t * d.x());
        const double b = gamma * (2.0 * t * d.y());
        sq = a * a + b * b;
        break;
      }
      case UncertaintySpec::Rho1Only: {
        const double a = gamma * (2.0 * t * d.x());
        sq = a * a;
        break;
      }
      case UncertaintySpec::Rho2Only: {
        const double a = gamma * (2.0 * t * d.y());
        sq = a * a;
        break;
      }
      case UncertaintySpec::SpeedOnly:
      case UncertaintySpec::HeadingOnly: {
        const auto which =
            cfg.uncertainty_spec == UncertaintySpec::SpeedOnly ? PolarParameter::Speed : PolarParameter::Heading;
        const double a = gamma * constraint_sensitivity_polar(x_p, x_w_nominal, t, nominal_speed(cfg),
                                                              nominal_heading(cfg), which);
        sq = a * a;
        break;
      }
    }
    return cfg.Q.scalar_value() * sq;
  }
  return rcs_sample(x_p, x_w_nominal, t, cfg).weighted_norm_sq;
}

double risk_of_sequence(std::span<const RcsSample> samples) {
  double sum = 0.0;
  for (const auto& s : samples) sum += s.weighted_norm_sq;
  return sum;
}

std::vector<SensitivityMatrix> integrate_sensitivity(const LinearizedDynamics& dyn, double t0, double dt,
                                                     int steps, OdeMethod method, int rk4_substeps) {
  if (steps < 0) throw std::invalid_argument("integrate_sensitivity: negative step count");
  if (rk4_substeps < 1) throw std::invalid_argument("integrate_sensitivity: rk4_substeps must be >= 1");

  std::vector<SensitivityMatrix> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(dyn.state_dim, dyn.param_dim);
  out.push_back({S, t0});

  auto rhs = [&](double t, const Eigen::MatrixXd& s) -> Eigen::MatrixXd {
    return dyn.state_jacobian(t) * s + dyn.param_jacobian(t);
  };

  for (int k = 0; k < steps; ++k) {
    const double tk = t0 + k * dt;
    if (method == OdeMethod::ExactLinear) {
      const Eigen::MatrixXd A = dyn.state_jacobian(tk);
      const Eigen::MatrixXd B = dyn.param_jacobian(tk);
      if (A.isZero(0.0)) {
        S += B * dt;
      } else {
        // Piecewise-constant A: S+ = e^{A dt} S + (int_0^dt e^{A s} ds) B,
        // via a truncated series; adequate for the small steps used here.
        const int n = dyn.state_dim;
        Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd expm = term;
        Eigen::MatrixXd integral = term * dt;
        for (int j = 1; j < 20; ++j) {
          term = term * A * dt / static_cast<double>(j);
          expm += term;
          integral += term * dt / static_cast<double>(j + 1);
        }
        S = expm * S + integral * B;
      }
    } else {
      const double h = dt / rk4_substeps;
      for (int j = 0; j < rk4_substeps; ++j) {
        const double t = tk + j * h;
        const Eigen::MatrixXd k1 = rhs(t, S);
        const Eigen::MatrixXd k2 = rhs(t + 0.5 * h, S + 0.5 * h * k1);
        const Eigen::MatrixXd k3 = rhs(t + 0.5 * h, S + 0.5 * h * k2);
        const Eigen::MatrixXd k4 = rhs(t + h, S + h * k3);
        S += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
    }
    out.push_back({S, t0 + (k + 1) * dt});
  }
  return out;
}

std::vector<SensitivityMatrix> propagate_sensitivity_ode(const ScenarioConfig& cfg, const ControlSequence& u_seq,
                                                         const ControlSequence& v_seq, OdeMethod method, double t0) {
  if (u_seq.size() != v_seq.size()) {
    throw std::invalid_argument("propagate_sensitivity_ode: control sequences differ in length");
  }
  // f(x, rho) = (u; v; rho) with open-loop u, v: A = 0, B = [0; 0; I].
  LinearizedDynamics dyn;
  dyn.state_dim = 6;
  dyn.param_dim = 2;
  dyn.state_jacobian = [](double) { return Eigen::MatrixXd::Zero(6, 6); };
  dyn.param_jacobian = [](double) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(6, 2);
    B.bottomRows(2).setIdentity();
    return B;
  };
  return integrate_sensitivity(dyn, t0, cfg.dt, static_cast<int>(u_seq.size()), method);
}

Eigen::RowVectorXd constraint_state_gradient(const Vec2& x_p, const Vec2& x_w) {
  const Vec2 d = x_p - x_w;
  Eigen::RowVectorXd grad = Eigen::RowVectorXd::Zero(6);
  grad(0) = -2.0 * d.x();
  grad(1) = -2.0 * d.y();
  grad(4) = 2.0 * d.x();
  grad(5) = 2.0 * d.y();
  return grad;
}

FieldGrid rcs_field_grid(const ScenarioConfig& cfg, double t, const GridSpec& grid) {
  if (grid.resolution < 2) throw std::invalid_argument("rcs_field_grid: resolution must be at least 2");
  if (!(grid.x1_max > grid.x1_min) || !(grid.x2_max > grid.x2_min)) {
    throw std::invalid_argument("rcs_field_grid: empty grid extent");
  }
  if (t < 0.0) throw std::invalid_argument("rcs_field_grid: negative time");

  const int n = grid.resolution;
  FieldGrid out;
  out.x1.resize(n);
  out.x2.resize(n);
  for (int i = 0; i < n; ++i) {
    out.x1[i] = grid.x1_min + (grid.x1_max - grid.x1_min) * i / (n - 1);
    out.x2[i] = grid.x2_min + (grid.x2_max - grid.x2_min) * i / (n - 1);
  }
  const Vec2 x_w = cfg.obstacle_start + cfg.rho_nominal * t;
  out.values.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.values(i, j) = rcs_sample(Vec2(out.x1[i], out.x2[j]), x_w, t, cfg).s_gamma.norm();
    }
  }
  return out;
}

}  // namespace asym_pe
