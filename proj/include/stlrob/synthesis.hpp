#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "stlrob/dynamics.hpp"
#include "stlrob/error.hpp"
#include "stlrob/formula.hpp"
#include "stlrob/robustness.hpp"

namespace stlrob {

using CostFunction = std::function<double(const Vector& u, const Vector& q_next)>;

/// J(u, q) = ‖u‖²
inline double quadratic_cost(const Vector& u, const Vector&) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return s;
}

/// Objective value for a rollout that leaves the state box.
inline constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

/// Maximize robustness(spec, rollout) - λ Σ J(u[k], q[k+1]) over u ∈ U^T.
struct SynthesisProblem {
  SystemModel model;
  Formula spec = Formula::top();
  std::size_t horizon = 0;
  double lambda = 0.0;
  CostFunction cost = quadratic_cost;
  Semantics semantics = Semantics::agm();

  void validate() const {
    model.validate();
    if (contains(spec, Op::Until)) throw UnsupportedError("Until cannot be optimized");
    if (horizon < static_cast<std::size_t>(stlrob::horizon(spec))) {
      throw DomainError("horizon T = " + std::to_string(horizon) +
                        " is shorter than the formula horizon " +
                        std::to_string(stlrob::horizon(spec)));
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be >= 0");
    if (lambda > 0.0 && !cost) throw DomainError("lambda > 0 needs a cost function");
    // ±ρ_⊤ is infinite for the min/max semantics and would swamp every gradient.
    if (semantics.kind != SemanticsKind::Agm &&
        (contains(spec, Op::True) || contains(spec, Op::False))) {
      throw DomainError("true/false literals are not allowed in a " + semantics.name() +
                        " objective");
    }
    for (const auto& ch : channels(spec)) {
      bool found = std::any_of(model.outputs.begin(), model.outputs.end(),
                               [&](const OutputChannel& o) { return o.name == ch; });
      if (!found) throw DomainError("formula reads channel '" + ch + "' the model does not output");
    }
  }
};

struct OptimizerConfig {
  int max_iters = 300;
  /// α0 as a fraction of each input's half-width; α_i = α0 / sqrt(i + 1).
  double step0 = 0.1;
  /// Finite-difference step as a fraction of each input's half-width.
  double fd_step = 1e-4;
  int restarts = 5;
  std::uint64_t seed = 0;
  int stall_iters = 50;
  double stall_tol = 1e-6;

  void validate() const {
    if (max_iters <= 0) throw DomainError("max_iters must be positive");
    if (!(step0 > 0.0)) throw DomainError("step0 must be positive");
    if (!(fd_step > 0.0)) throw DomainError("fd_step must be positive");
    if (restarts < 0) throw DomainError("restarts must be non-negative");
    if (stall_iters <= 0) throw DomainError("stall_iters must be positive");
    if (!(stall_tol >= 0.0)) throw DomainError("stall_tol must be non-negative");
  }
};

struct SynthesisResult {
  InputSequence u_star;
  StateTrajectory trajectory;
  /// Objective value of u_star (robustness minus weighted cost).
  double score = kInfeasible;
  /// Robustness term alone.
  double robustness = kInfeasible;
  /// Best objective so far, one entry per iteration across all restarts.
  std::vector<double> score_history;
  bool feasible = false;
  int iterations = 0;
  int restarts_used = 0;
  /// Candidates whose rollout left the state box.
  int infeasible_evaluations = 0;
};

/// Robustness of the rollout, or kInfeasible if it leaves the state box.
inline double rollout_robustness(const SynthesisProblem& p, const InputSequence& u) {
  const auto q = simulate(p.model, u);
  if (first_state_violation(p.model, q)) return kInfeasible;
  return evaluate(p.spec, to_trace(p.model, q), 0, p.semantics).score;
}

inline double objective(const SynthesisProblem& p, const InputSequence& u) {
  if (u.size() != p.horizon) {
    throw DomainError("input sequence has length " + std::to_string(u.size()) + ", expected " +
                      std::to_string(p.horizon));
  }
  const auto q = simulate(p.model, u);
  if (first_state_violation(p.model, q)) return kInfeasible;
  double value = evaluate(p.spec, to_trace(p.model, q), 0, p.semantics).score;
  if (p.lambda > 0.0) {
    double total = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) total += p.cost(u[k], q[k + 1]);
    value -= p.lambda * total;
  }
  return value;
}

/// Central finite differences of `f` at `u`, one component at a time. The
/// probe step for input j is h times that input's half-width; probes are
/// projected onto the box. Where one probe evaluates to -inf the difference
/// becomes one-sided against f(u); where no finite pair exists the component
/// is 0.
template <class Objective>
InputSequence fd_gradient(Objective&& f, const InputSequence& u, const Box& box, double h) {
  InputSequence grad(u.size(), Vector(box.dim(), 0.0));
  std::optional<double> center;
  auto f_center = [&] {
    if (!center) center = f(u);
    return *center;
  };
  InputSequence probe = u;
  for (std::size_t k = 0; k < u.size(); ++k) {
    for (std::size_t j = 0; j < box.dim(); ++j) {
      const Range& r = box.bounds[j];
      const double step = h * r.half_width();
      const double hi = std::min(u[k][j] + step, r.max);
      const double lo = std::max(u[k][j] - step, r.min);
      probe[k][j] = hi;
      const double f_hi = f(probe);
      probe[k][j] = lo;
      const double f_lo = f(probe);
      probe[k][j] = u[k][j];

      const bool ok_hi = std::isfinite(f_hi);
      const bool ok_lo = std::isfinite(f_lo);
      double g = 0.0;
      if (ok_hi && ok_lo) {
        if (hi > lo) g = (f_hi - f_lo) / (hi - lo);
      } else if (ok_hi || ok_lo) {
        const double f0 = f_center();
        if (std::isfinite(f0)) {
          if (ok_hi && hi > u[k][j]) g = (f_hi - f0) / (hi - u[k][j]);
          if (ok_lo && lo < u[k][j]) g = (f0 - f_lo) / (u[k][j] - lo);
        }
      }
      grad[k][j] = g;
    }
  }
  return grad;
}

inline InputSequence fd_gradient(const SynthesisProblem& p, const InputSequence& u, double h) {
  return fd_gradient([&](const InputSequence& v) { return objective(p, v); }, u,
                     p.model.input_box, h);
}

namespace detail {

// Total normalized distance of the rollout outside the state box, negated.
// Drives an iterate back into the box when the real objective is -inf.
inline double state_box_recovery(const SynthesisProblem& p, const InputSequence& u) {
  const auto q = simulate(p.model, u);
  double excess = 0.0;
  for (const auto& state : q) {
    for (std::size_t i = 0; i < state.size(); ++i) {
      const Range& r = p.model.state_box.bounds[i];
      excess += std::max({0.0, r.min - state[i], state[i] - r.max}) / r.half_width();
    }
  }
  return -excess;
}

inline InputSequence random_inputs(const SynthesisProblem& p, std::mt19937_64& rng) {
  InputSequence u(p.horizon, Vector(p.model.input_dim));
  for (auto& uk : u) {
    for (std::size_t j = 0; j < uk.size(); ++j) {
      const Range& r = p.model.input_box.bounds[j];
      uk[j] = std::uniform_real_distribution<double>(r.min, r.max)(rng);
    }
  }
  return u;
}

}  // namespace detail

/// Projected sub-gradient ascent on the objective with finite-difference
/// gradients and step size α0 / sqrt(i + 1).
///
/// Each step moves along the gradient expressed in normalized input
/// coordinates, scaled so its root-mean-square component equals the current
/// step size; the result is projected back onto the input box. Steps are
/// always taken. While the iterate's rollout is outside the state box (the
/// objective is -inf there) the ascent follows a recovery objective that
/// measures how far the rollout leaves the box. A run ends at max_iters or
/// after stall_iters iterations without an improvement above stall_tol. Runs
/// that end infeasible are restarted from fresh random inputs up to
/// `restarts` times; the best iterate over all runs is returned.
inline SynthesisResult gradient_ascent(const SynthesisProblem& p, const OptimizerConfig& cfg) {
  p.validate();
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const Box& box = p.model.input_box;

  SynthesisResult best;
  int infeasible = 0;
  auto eval = [&](const InputSequence& u) {
    const double v = objective(p, u);
    if (v == kInfeasible) ++infeasible;
    return v;
  };

  for (int run = 0; run <= cfg.restarts; ++run) {
    InputSequence u = detail::random_inputs(p, rng);
    double f = eval(u);
    double run_best = f;
    int last_improvement = 0;
    if (f > best.score || best.u_star.empty()) {
      best.u_star = u;
      best.score = f;
    }

    for (int i = 0; i < cfg.max_iters; ++i) {
      const bool recovering = f == kInfeasible;
      const InputSequence g =
          recovering ? fd_gradient([&](const InputSequence& v) {
                         return detail::state_box_recovery(p, v);
                       }, u, box, cfg.fd_step)
                     : fd_gradient(eval, u, box, cfg.fd_step);

      // Gradient with respect to normalized inputs z = (u - c) / half_width,
      // rescaled so its root-mean-square component equals the step size.
      double sq = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        for (std::size_t j = 0; j < box.dim(); ++j) {
          const double gz = g[k][j] * box.bounds[j].half_width();
          sq += gz * gz;
        }
      }
      const double rms = std::sqrt(sq / static_cast<double>(g.size() * box.dim()));
      if (rms > 0.0) {
        const double alpha = cfg.step0 / std::sqrt(static_cast<double>(i) + 1.0);
        for (std::size_t k = 0; k < g.size(); ++k) {
          for (std::size_t j = 0; j < box.dim(); ++j) {
            const double hw = box.bounds[j].half_width();
            u[k][j] += alpha * hw * (g[k][j] * hw / rms);
          }
          u[k] = box.project(std::move(u[k]));
        }
        f = eval(u);
      }

      if (f > run_best + cfg.stall_tol || (run_best == kInfeasible && f != kInfeasible)) {
        last_improvement = i;
      }
      run_best = std::max(run_best, f);
      if (f > best.score) {
        best.u_star = u;
        best.score = f;
      }
      best.score_history.push_back(best.score);
      ++best.iterations;
      if (i - last_improvement >= cfg.stall_iters) break;
    }

    best.restarts_used = run;
    const double rob = rollout_robustness(p, best.u_star);
    if (rob > 0.0) break;
  }

  best.trajectory = simulate(p.model, best.u_star);
  best.robustness = rollout_robustness(p, best.u_star);
  best.feasible = best.robustness > 0.0;
  best.infeasible_evaluations = infeasible;
  return best;
}

}  // namespace stlrob
