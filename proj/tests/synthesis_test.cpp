#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stlrob/config.hpp"
#include "stlrob/parse.hpp"
#include "stlrob/synthesis.hpp"

using namespace stlrob;

namespace {

SynthesisProblem planar_problem(const std::string& spec, std::size_t T) {
  SynthesisProblem p;
  p.model = make_model("planar_integrator", {0, 1}, Box{{{0, 4}, {0, 4}}},
                       Box{{{-1.5, 1.5}, {-1.5, 1.5}}}, {{"x", 0}, {"y", 1}});
  p.spec = parse(spec);
  p.horizon = T;
  return p;
}

InputSequence constant_inputs(std::size_t T, Vector u) { return InputSequence(T, std::move(u)); }

// Every input sequence on a grid with ux from `levels` and uy = 0.
template <class Visit>
void for_each_grid_policy(std::size_t T, const std::vector<double>& levels, Visit&& visit,
                          InputSequence& u, std::size_t k = 0) {
  if (k == T) {
    visit(u);
    return;
  }
  for (double v : levels) {
    u[k] = {v, 0.0};
    for_each_grid_policy(T, levels, visit, u, k + 1);
  }
}

}  // namespace

TEST(FdGradient, LinearAndQuadratic) {
  const Box box{{{-1.5, 1.5}, {-1.5, 1.5}}};
  auto linear = [](const InputSequence& u) {
    double s = 0;
    for (const auto& uk : u) s += uk[0] + uk[1];
    return s;
  };
  auto quad = [](const InputSequence& u) {
    double s = 0;
    for (const auto& uk : u) s -= uk[0] * uk[0] + uk[1] * uk[1];
    return s;
  };
  const InputSequence interior{{0.3, -0.7}, {1.1, 0.0}, {-1.2, 0.4}};
  for (const auto& row : fd_gradient(linear, interior, box, 1e-4)) {
    for (double g : row) EXPECT_NEAR(g, 1.0, 1e-6);
  }
  // On the boundary the probe is projected and the difference is one-sided.
  for (const auto& row : fd_gradient(linear, constant_inputs(2, {1.5, -1.5}), box, 1e-4)) {
    for (double g : row) EXPECT_NEAR(g, 1.0, 1e-6);
  }
  for (const auto& row : fd_gradient(quad, constant_inputs(3, {0, 0}), box, 1e-4)) {
    for (double g : row) EXPECT_NEAR(g, 0.0, 1e-6);
  }
}

TEST(FdGradient, InfeasibleProbeFallsBackToOneSided) {
  const Box box{{{-1, 1}}};
  auto f = [](const InputSequence& u) {
    return u[0][0] > 0.5 ? -INFINITY : 2.0 * u[0][0];
  };
  const auto g = fd_gradient(f, InputSequence{{0.5}}, box, 1e-3);
  EXPECT_NEAR(g[0][0], 2.0, 1e-9);
  auto dead = [](const InputSequence&) { return -INFINITY; };
  EXPECT_EQ(fd_gradient(dead, InputSequence{{0.0}}, box, 1e-3)[0][0], 0.0);
}

TEST(FdGradient, StableUnderStepRefinement) {
  auto p = planar_problem("F[1,5] (x > 0.2 && y > 0.2) && G[0,5] x < 0.9", 5);
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  int checked = 0;
  for (int i = 0; i < 40; ++i) {
    InputSequence in(5);
    for (auto& uk : in) uk = {u(rng) + 0.4, u(rng) + 0.2};
    if (!std::isfinite(objective(p, in))) continue;
    const auto g = fd_gradient(p, in, 1e-4);
    const auto g10 = fd_gradient(p, in, 1e-5);
    double norm = 0, diff = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      for (std::size_t j = 0; j < 2; ++j) {
        norm = std::max(norm, std::abs(g[k][j]));
        diff = std::max(diff, std::abs(g[k][j] - g10[k][j]));
      }
    }
    EXPECT_GT(norm, 0.0);
    EXPECT_LE(diff, 1e-3 * norm);
    ++checked;
  }
  EXPECT_GT(checked, 20);
}

TEST(Objective, Examples) {
  auto bottom = planar_problem("false", 3);
  EXPECT_EQ(objective(bottom, constant_inputs(3, {0.2, 0.1})), -1.0);

  auto p = planar_problem("F[1,3] x > 0", 3);
  const auto zero = constant_inputs(3, {0, 0});
  const double pure = objective(p, zero);
  p.lambda = 1.0;
  EXPECT_EQ(objective(p, zero), pure);
  const auto moving = constant_inputs(3, {1.0, 0.0});
  const double rob = rollout_robustness(p, moving);
  EXPECT_NEAR(objective(p, moving), rob - 3.0, 1e-15);

  EXPECT_EQ(objective(p, constant_inputs(3, {-1.0, 0.0})), kInfeasible);
  EXPECT_THROW(objective(p, constant_inputs(2, {0, 0})), DomainError);
}

TEST(Problem, Validation) {
  EXPECT_THROW(planar_problem("F[1,5] x > 0", 4).validate(), DomainError);
  EXPECT_THROW(planar_problem("x > 0 U[0,2] y > 0", 3).validate(), UnsupportedError);
  EXPECT_THROW(planar_problem("F[0,2] z > 0", 3).validate(), DomainError);
  auto p = planar_problem("F[0,2] x > 0 || true", 3);
  EXPECT_NO_THROW(p.validate());
  p.semantics = Semantics::traditional();
  EXPECT_THROW(p.validate(), DomainError);
  p = planar_problem("F[0,2] x > 0", 3);
  p.lambda = -1;
  EXPECT_THROW(p.validate(), DomainError);
  OptimizerConfig cfg;
  cfg.max_iters = 0;
  EXPECT_THROW(gradient_ascent(planar_problem("x > 0", 1), cfg), DomainError);
}

TEST(GradientAscent, ReachesGridConfirmedTarget) {
  const auto p = planar_problem("F[1,3] x > 0.5", 3);
  // Oracle: some coarse grid policy satisfies the formula.
  bool exists = false;
  InputSequence grid(3);
  for_each_grid_policy(3, {-1.5, -1, -0.5, 0, 0.5, 1, 1.5}, [&](const InputSequence& u) {
    const auto q = simulate(p.model, u);
    if (!first_state_violation(p.model, q) && traditional(p.spec, to_trace(p.model, q)).score > 0) {
      exists = true;
    }
  }, grid);
  ASSERT_TRUE(exists);

  OptimizerConfig cfg;
  cfg.seed = 3;
  const auto r = gradient_ascent(p, cfg);
  EXPECT_TRUE(r.feasible);
  EXPECT_GT(r.score, 0.0);
  EXPECT_EQ(r.trajectory, simulate(p.model, r.u_star));
  EXPECT_GT(traditional(p.spec, to_trace(p.model, r.trajectory)).score, 0.0);
}

TEST(GradientAscent, UnsatisfiableSpec) {
  const auto r = gradient_ascent(planar_problem("false", 3), OptimizerConfig{});
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.score, -1.0);
  EXPECT_EQ(r.restarts_used, OptimizerConfig{}.restarts);
}

TEST(GradientAscent, Invariants) {
  const auto cfg = load_problem(STLROB_CONFIG_DIR "/problem3.json");
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    OptimizerConfig oc = cfg.optimizer;
    oc.seed = seed;
    const auto r = gradient_ascent(cfg.problem, oc);
    ASSERT_FALSE(r.score_history.empty());
    EXPECT_EQ(static_cast<int>(r.score_history.size()), r.iterations);
    for (std::size_t i = 1; i < r.score_history.size(); ++i) {
      EXPECT_GE(r.score_history[i], r.score_history[i - 1]);
    }
    EXPECT_EQ(r.score_history.back(), r.score);
    for (const auto& uk : r.u_star) EXPECT_TRUE(cfg.problem.model.input_box.contains(uk));
    EXPECT_EQ(r.feasible, r.score > 0.0);
    if (r.feasible) {
      EXPECT_GT(traditional(cfg.problem.spec, to_trace(cfg.problem.model, r.trajectory)).score,
                0.0);
    }
    const auto again = gradient_ascent(cfg.problem, oc);
    EXPECT_EQ(again.u_star, r.u_star);
    EXPECT_EQ(again.score_history, r.score_history);
  }
}
