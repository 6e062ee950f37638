#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <random>
#include <vector>

#include "stlrob/dynamics.hpp"
#include "stlrob/robustness.hpp"
#include "stlrob/synthesis.hpp"

namespace stlrob {

struct DisturbanceConfig {
  double sigma = 0.0;
  int n_runs = 100;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(sigma >= 0.0)) throw DomainError("sigma must be non-negative");
    if (n_runs < 1) throw DomainError("n_runs must be at least 1");
  }
};

/// u + N(0, σ²) per component, projected onto the input box.
template <class Rng>
InputSequence perturb_policy(const InputSequence& u_star, double sigma, const Box& input_box,
                             Rng& rng) {
  InputSequence u = u_star;
  if (sigma == 0.0) return u;
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& uk : u) {
    for (double& v : uk) v += noise(rng);
    uk = input_box.project(std::move(uk));
  }
  return u;
}

struct RunOutcome {
  int run = 0;
  bool satisfied = false;
  /// Traditional robustness of the disturbed rollout; -inf if it left the
  /// state box.
  double score = kInfeasible;
};

struct FailureReport {
  double sigma = 0.0;
  double rate = 0.0;
  std::vector<RunOutcome> runs;
};

/// Independent generator for one Monte-Carlo run, derived from (seed, run)
/// so runs can execute in any order.
inline std::mt19937_64 run_stream(std::uint64_t seed, int run) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(run)};
  return std::mt19937_64(seq);
}

/// Fraction of disturbed rollouts that violate the specification. Every run
/// is judged by the traditional semantics regardless of how u_star was
/// obtained; rollouts that leave the state box count as failures.
inline FailureReport failure_rate(const SynthesisProblem& p, const InputSequence& u_star,
                                  const DisturbanceConfig& cfg) {
  cfg.validate();
  if (u_star.size() != p.horizon) {
    throw DomainError("policy has length " + std::to_string(u_star.size()) + ", expected " +
                      std::to_string(p.horizon));
  }
  FailureReport report{cfg.sigma, 0.0, {}};
  report.runs.reserve(static_cast<std::size_t>(cfg.n_runs));
  int failures = 0;
  for (int r = 0; r < cfg.n_runs; ++r) {
    auto rng = run_stream(cfg.seed, r);
    const auto u = perturb_policy(u_star, cfg.sigma, p.model.input_box, rng);
    RunOutcome out{r, false, kInfeasible};
    try {
      const auto q = simulate(p.model, u);
      out.score = traditional(p.spec, to_trace(p.model, q), 0).score;
      out.satisfied = out.score > 0.0;
    } catch (const Error&) {
      out.satisfied = false;
    }
    if (!out.satisfied) ++failures;
    report.runs.push_back(out);
  }
  report.rate = static_cast<double>(failures) / cfg.n_runs;
  return report;
}

/// Results table: sigma,run,satisfied,score
inline void write_failure_csv(std::ostream& out, const std::vector<FailureReport>& reports) {
  out << "sigma,run,satisfied,score\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.runs) {
      out << Formula::format_number(rep.sigma) << ',' << r.run << ',' << (r.satisfied ? 1 : 0)
          << ',' << Formula::format_number(r.score) << '\n';
    }
  }
}

}  // namespace stlrob
