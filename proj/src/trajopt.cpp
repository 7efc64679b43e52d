#include "asym_pe/trajopt.hpp"

#include "asym_pe/game_solver.hpp"
#include "asym_pe/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

namespace asym_pe {
namespace {

// Everything about a horizon problem that does not depend on the optimising
// player's headings, precomputed once per best response.
class HorizonEvaluator {
 public:
  explicit HorizonEvaluator(const HorizonProblem& prob) : prob_(prob), n_(prob.cfg.N) {
    const auto& cfg = prob.cfg;
    const auto& s = prob.start;
    if (prob.role == Role::PursuerMin && prob.objective == Objective::DeceptionBlend) {
      throw std::invalid_argument("DeceptionBlend is an evader objective");
    }
    if (prob.role == Role::EvaderMax && prob.objective == Objective::TerminalDistancePlusRisk) {
      throw std::invalid_argument("TerminalDistancePlusRisk is a pursuer objective");
    }
    if (prob.objective != Objective::DeceptionBlend && static_cast<int>(prob.opponent_seq.size()) != n_) {
      throw std::invalid_argument("opponent sequence length differs from horizon N");
    }

    own_speed_ = prob.role == Role::PursuerMin ? cfg.u_c : cfg.v_c;
    own_start_ = prob.role == Role::PursuerMin ? s.x_p : s.x_e;
    const Vec2 opp_start = prob.role == Role::PursuerMin ? s.x_e : s.x_p;

    const Vec2 obs0 = prob.obstacle_model == ObstacleModel::Nominal ? s.x_w_nominal : s.x_w_true;
    const Vec2 rho = prob.obstacle_model == ObstacleModel::Nominal ? cfg.rho_nominal : cfg.rho_true;

    obstacle_.resize(n_ + 1);
    nominal_.resize(n_ + 1);
    true_.resize(n_ + 1);
    times_.resize(n_ + 1);
    opponent_.resize(n_ + 1);
    obstacle_[0] = obs0;
    nominal_[0] = s.x_w_nominal;
    true_[0] = s.x_w_true;
    opponent_[0] = opp_start;
    times_[0] = s.t;
    for (int i = 1; i <= n_; ++i) {
      obstacle_[i] = obstacle_[i - 1] + rho * cfg.dt;
      nominal_[i] = nominal_[i - 1] + cfg.rho_nominal * cfg.dt;
      true_[i] = true_[i - 1] + cfg.rho_true * cfg.dt;
      times_[i] = times_[i - 1] + cfg.dt;
      if (prob.objective != Objective::DeceptionBlend) {
        opponent_[i] = opponent_[i - 1] + prob.opponent_seq.velocity(static_cast<std::size_t>(i - 1)) * cfg.dt;
      }
    }
  }

  struct Terms {
    double objective = 0.0;  // natural sense
    double penalty_sum = 0.0;
    double max_violation = 0.0;
  };

  Terms evaluate(std::span<const double> headings) const {
    const auto& cfg = prob_.cfg;
    Terms out;
    Vec2 own = own_start_;
    Vec2 model_p = prob_.start.x_p;
    double risk = 0.0;
    const bool with_risk = prob_.objective == Objective::TerminalDistancePlusRisk;
    const bool deceptive = prob_.objective == Objective::DeceptionBlend;
    for (int i = 1; i <= n_; ++i) {
      const double h = headings[static_cast<std::size_t>(i - 1)];
      if (deceptive) {
        // Pursuer model reacts to the evader position at the previous sample
        // and stops once it sits exactly on the evader.
        if (own != model_p) model_p += pure_pursuit_model(model_p, own, cfg.u_c) * cfg.dt;
      }
      own += own_speed_ * Vec2(std::cos(h), std::sin(h)) * cfg.dt;
      const double g = constraint_g(own, obstacle_[i], cfg.r_o) + prob_.settings.constraint_margin;
      if (g > 0.0) {
        out.penalty_sum += g * g;
        out.max_violation = std::max(out.max_violation, g);
      }
      if (with_risk) risk += rcs_weighted_norm_sq(own, nominal_[i], times_[i], cfg);
    }
    if (deceptive) {
      out.objective = prob_.cfg.alpha_o * (model_p - own).norm() - prob_.cfg.alpha_d * (model_p - true_[n_]).norm();
    } else {
      out.objective = (own - opponent_[n_]).norm();
      if (with_risk) out.objective += risk;
    }
    return out;
  }

  double sign() const { return prob_.role == Role::PursuerMin ? 1.0 : -1.0; }

  double penalized(std::span<const double> headings, double mu) const {
    const Terms t = evaluate(headings);
    return sign() * t.objective + mu * t.penalty_sum;
  }

 private:
  const HorizonProblem& prob_;
  int n_;
  double own_speed_ = 0.0;
  Vec2 own_start_;
  std::vector<Vec2> obstacle_;
  std::vector<Vec2> nominal_;
  std::vector<Vec2> true_;
  std::vector<Vec2> opponent_;
  std::vector<double> times_;
};

struct Candidate {
  std::vector<double> headings;
  double objective = 0.0;  // minimisation form
  double violation = 0.0;
  bool converged = false;
};

// Normalised gradient descent with Armijo backtracking on the penalised
// objective. Returns the number of iterations taken.
int descend(const HorizonEvaluator& ev, std::vector<double>& x, double mu, const TrajoptSettings& st,
            bool& converged) {
  auto f = [&](std::span<const double> h) { return ev.penalized(h, mu); };
  double fx = f(x);
  std::vector<double> trial(x.size());
  converged = false;
  int it = 0;
  for (; it < st.max_descent_iters; ++it) {
    const std::vector<double> grad = central_difference_gradient(f, x, st.fd_step);
    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (gnorm < 1e-10) {
      converged = true;
      break;
    }
    bool accepted = false;
    double ft = fx;
    for (double alpha = st.initial_step; alpha >= st.min_step; alpha *= st.backtrack) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - alpha * grad[i] / gnorm;
      ft = f(trial);
      if (ft <= fx - st.armijo * alpha * gnorm) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      converged = true;
      break;
    }
    const double gain = fx - ft;
    x.swap(trial);
    fx = ft;
    if (gain <= 1e-13 * (1.0 + std::abs(fx))) {
      converged = true;
      ++it;
      break;
    }
  }
  return it;
}

bool better(const Candidate& a, const Candidate& b) {
  if (a.objective != b.objective) return a.objective < b.objective;
  return std::lexicographical_compare(a.headings.begin(), a.headings.end(), b.headings.begin(), b.headings.end());
}

}  // namespace

std::vector<GameState> rollout(const GameState& start, const ControlSequence& mine, const ControlSequence& theirs,
                               const ScenarioConfig& cfg, Role role) {
  if (mine.size() != theirs.size()) throw std::invalid_argument("rollout: sequence lengths differ");
  const ControlSequence& u = role == Role::PursuerMin ? mine : theirs;
  const ControlSequence& v = role == Role::PursuerMin ? theirs : mine;
  std::vector<GameState> states;
  states.reserve(mine.size() + 1);
  states.push_back(start);
  for (std::size_t i = 0; i < mine.size(); ++i) {
    states.push_back(step_state(states.back(), u.headings[i], v.headings[i], cfg));
  }
  return states;
}

double evaluate_objective(const HorizonProblem& prob, const ControlSequence& seq) {
  if (static_cast<int>(seq.size()) != prob.cfg.N) throw std::invalid_argument("evaluate_objective: length != N");
  return HorizonEvaluator(prob).evaluate(seq.headings).objective;
}

double max_constraint_violation(const HorizonProblem& prob, const ControlSequence& seq) {
  if (static_cast<int>(seq.size()) != prob.cfg.N) {
    throw std::invalid_argument("max_constraint_violation: length != N");
  }
  return HorizonEvaluator(prob).evaluate(seq.headings).max_violation;
}

double penalized_objective(const HorizonProblem& prob, std::span<const double> headings, double mu) {
  if (static_cast<int>(headings.size()) != prob.cfg.N) {
    throw std::invalid_argument("penalized_objective: length != N");
  }
  return HorizonEvaluator(prob).penalized(headings, mu);
}

std::vector<double> central_difference_gradient(const std::function<double(std::span<const double>)>& f,
                                                std::span<const double> x, double h) {
  std::vector<double> grad(x.size());
  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

BestResponse best_response(const HorizonProblem& prob, const ControlSequence& init) {
  const auto& st = prob.settings;
  if (static_cast<int>(init.size()) != prob.cfg.N) throw std::invalid_argument("best_response: init length != N");
  if (st.multistart < 1) throw std::invalid_argument("best_response: multistart must be >= 1");

  const HorizonEvaluator ev(prob);
  const double own_speed = prob.role == Role::PursuerMin ? prob.cfg.u_c : prob.cfg.v_c;

  auto score = [&](std::vector<double> h, bool converged) {
    for (double& a : h) a = wrap_angle(a);
    const auto terms = ev.evaluate(h);
    return Candidate{std::move(h), ev.sign() * terms.objective, terms.max_violation, converged};
  };

  std::mt19937_64 rng(prob.seed);
  std::normal_distribution<double> noise(0.0, st.perturbation_sigma);

  std::optional<Candidate> best;
  int total_iters = 0;
  double least_violation = std::numeric_limits<double>::infinity();

  auto consider = [&](Candidate c) {
    least_violation = std::min(least_violation, c.violation);
    if (c.violation > st.feasibility_tol) return;
    if (!best || better(c, *best)) best = std::move(c);
  };

  // The initial guess itself competes, so a feasible init is never worsened.
  consider(score(init.headings, false));

  for (int m = 0; m < st.multistart; ++m) {
    std::vector<double> x = init.headings;
    if (m > 0) {
      for (double& a : x) a += noise(rng);
    }
    bool converged = false;
    for (double mu = st.mu_initial;; mu *= st.mu_growth) {
      total_iters += descend(ev, x, mu, st, converged);
      if (ev.evaluate(x).max_violation <= st.feasibility_tol || mu >= st.mu_max) break;
    }
    consider(score(std::move(x), converged));
  }

  if (!best) {
    throw NoFeasibleSequence("best_response: no start reached feasibility (least violation " +
                             std::to_string(least_violation) + ")");
  }
  BestResponse out;
  out.sequence = ControlSequence{best->headings, own_speed};
  out.objective_value = ev.sign() * best->objective;
  out.constraint_max_violation = best->violation;
  out.solver_iters = total_iters;
  out.converged = best->converged;
  return out;
}

}  // namespace asym_pe
