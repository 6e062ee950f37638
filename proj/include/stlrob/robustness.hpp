#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "stlrob/error.hpp"
#include "stlrob/formula.hpp"
#include "stlrob/logic_algebra.hpp"
#include "stlrob/signal.hpp"

namespace stlrob {

enum class SemanticsKind { Traditional, Smooth, Agm };

enum class Status { Sat, Violated, Inconclusive };

/// How a predicate `s > π` is scored under AGM.
///   Half: (s - π) / 2, which keeps every score in [-1,1] for s, π in [-1,1].
///   Unit: (s - π), clipped to [-1,1]; this is the arithmetic under which the
///         classic worked comparisons (0.5 / 0.25 / 0.125, 0.41) come out.
enum class PredicateScale { Half, Unit };

struct SmoothConfig {
  double beta = 10.0;

  void validate() const {
    if (!(std::isfinite(beta) && beta > 0.0)) {
      throw DomainError("smooth beta must be finite and positive");
    }
  }
};

/// Score of the literal `true` under the traditional and smooth semantics.
struct TopRobustness {
  double rho_top = std::numeric_limits<double>::infinity();

  void validate() const {
    if (!(rho_top > 0.0)) throw DomainError("rho_top must be positive");
  }
};

struct Semantics {
  SemanticsKind kind = SemanticsKind::Agm;
  SmoothConfig smooth{};
  PredicateScale scale = PredicateScale::Half;
  TopRobustness top{};

  static Semantics traditional(TopRobustness top = {}) {
    return {SemanticsKind::Traditional, {}, PredicateScale::Half, top};
  }
  static Semantics smoothed(double beta, TopRobustness top = {}) {
    return {SemanticsKind::Smooth, {beta}, PredicateScale::Half, top};
  }
  static Semantics agm(PredicateScale scale = PredicateScale::Half) {
    return {SemanticsKind::Agm, {}, scale, {}};
  }

  std::string name() const {
    switch (kind) {
      case SemanticsKind::Traditional: return "traditional";
      case SemanticsKind::Smooth: return "smooth";
      case SemanticsKind::Agm: return "agm";
    }
    return {};
  }
};

struct Verdict {
  double score = 0.0;
  Status status = Status::Inconclusive;
  Semantics semantics{};
};

inline Status status_of(double score) noexcept {
  if (score > 0.0) return Status::Sat;
  if (score < 0.0) return Status::Violated;
  return Status::Inconclusive;
}

inline const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::Sat: return "sat";
    case Status::Violated: return "violated";
    case Status::Inconclusive: return "inconclusive";
  }
  return "";
}

/// (1/β) log Σ exp(β a_i), shifted by the maximum so it cannot overflow.
inline double soft_max(std::span<const double> a, double beta) {
  if (a.empty()) throw DomainError("soft_max of an empty set");
  const double shift = *std::max_element(a.begin(), a.end());
  if (std::isinf(shift)) return shift;
  double sum = 0.0;
  for (double v : a) sum += std::exp(beta * (v - shift));
  return shift + std::log(sum) / beta;
}

/// -(1/β) log Σ exp(-β a_i)
inline double soft_min(std::span<const double> a, double beta) {
  if (a.empty()) throw DomainError("soft_min of an empty set");
  const double shift = *std::min_element(a.begin(), a.end());
  if (std::isinf(shift)) return shift;
  double sum = 0.0;
  for (double v : a) sum += std::exp(-beta * (v - shift));
  return shift - std::log(sum) / beta;
}

namespace detail {

struct TraditionalRules {
  double rho_top;
  double top() const { return rho_top; }
  double predicate(double diff, double) const { return diff; }
  double all(std::span<const double> v) const { return *std::min_element(v.begin(), v.end()); }
  double any(std::span<const double> v) const { return *std::max_element(v.begin(), v.end()); }
};

struct SmoothRules {
  double rho_top;
  double beta;
  double top() const { return rho_top; }
  double predicate(double diff, double) const { return diff; }
  double all(std::span<const double> v) const { return soft_min(v, beta); }
  double any(std::span<const double> v) const { return soft_max(v, beta); }
};

struct AgmRules {
  PredicateScale scale;
  double top() const { return 1.0; }
  double predicate(double diff, double signal_value) const {
    if (!(signal_value >= -1.0 && signal_value <= 1.0)) {
      throw DomainError("AGM needs a normalized trace; found value " +
                        Formula::format_number(signal_value) + " outside [-1,1]");
    }
    if (scale == PredicateScale::Half) return 0.5 * diff;
    return std::clamp(diff, -1.0, 1.0);
  }
  double all(std::span<const double> v) const { return agm_and(v); }
  double any(std::span<const double> v) const { return agm_or(v); }
};

template <class Rules>
double evaluate(const Formula& f, const Trace& s, std::size_t t, const Rules& rules) {
  switch (f.op()) {
    case Op::True: return rules.top();
    case Op::False: return -rules.top();
    case Op::Predicate: {
      const double v = s.at(t, f.channel());
      const double diff = f.comparison() == Comparison::Greater ? v - f.threshold()
                                                                : f.threshold() - v;
      return rules.predicate(diff, v);
    }
    case Op::Not: return -evaluate(f.child(), s, t, rules);
    case Op::And:
    case Op::Or: {
      std::vector<double> scores;
      scores.reserve(f.children().size());
      for (const auto& c : f.children()) scores.push_back(evaluate(c, s, t, rules));
      return f.op() == Op::And ? rules.all(scores) : rules.any(scores);
    }
    case Op::Globally:
    case Op::Eventually: {
      std::vector<double> scores;
      const std::size_t lo = t + static_cast<std::size_t>(f.lower());
      const std::size_t hi = t + static_cast<std::size_t>(f.upper());
      scores.reserve(hi - lo + 1);
      for (std::size_t k = lo; k <= hi; ++k) scores.push_back(evaluate(f.child(), s, k, rules));
      return f.op() == Op::Globally ? rules.all(scores) : rules.any(scores);
    }
    case Op::Until: break;
  }
  throw UnsupportedError("Until has no quantitative semantics here");
}

inline void check_evaluable(const Formula& phi, const Trace& s, std::size_t t) {
  if (contains(phi, Op::Until)) throw UnsupportedError("Until has no quantitative semantics here");
  const std::size_t h = static_cast<std::size_t>(horizon(phi));
  if (t + h >= s.length()) {
    throw DomainError("formula needs samples up to step " + std::to_string(t + h) +
                      " but the trace has length " + std::to_string(s.length()));
  }
  for (const auto& c : channels(phi)) s.channel_index(c);
}

}  // namespace detail

/// Traditional min/max robustness ρ(φ, s, t).
inline Verdict traditional(const Formula& phi, const Trace& s, std::size_t t = 0,
                           TopRobustness top = {}) {
  top.validate();
  detail::check_evaluable(phi, s, t);
  const double r = detail::evaluate(phi, s, t, detail::TraditionalRules{top.rho_top});
  return {r, status_of(r), Semantics::traditional(top)};
}

/// Log-sum-exp approximation ρ̃(φ, s, t) with sharpness β.
inline Verdict smooth(const Formula& phi, const Trace& s, std::size_t t, SmoothConfig cfg,
                      TopRobustness top = {}) {
  cfg.validate();
  top.validate();
  detail::check_evaluable(phi, s, t);
  const double r = detail::evaluate(phi, s, t, detail::SmoothRules{top.rho_top, cfg.beta});
  return {r, status_of(r), Semantics::smoothed(cfg.beta, top)};
}

/// Arithmetic-geometric mean robustness η(φ, s, t) ∈ [-1,1]. The trace must
/// be normalized.
inline Verdict agm(const Formula& phi, const Trace& s, std::size_t t = 0,
                   PredicateScale scale = PredicateScale::Half) {
  detail::check_evaluable(phi, s, t);
  const double r = detail::evaluate(phi, s, t, detail::AgmRules{scale});
  return {r, status_of(r), Semantics::agm(scale)};
}

inline Verdict evaluate(const Formula& phi, const Trace& s, std::size_t t,
                        const Semantics& sem) {
  switch (sem.kind) {
    case SemanticsKind::Traditional: return traditional(phi, s, t, sem.top);
    case SemanticsKind::Smooth: return smooth(phi, s, t, sem.smooth, sem.top);
    case SemanticsKind::Agm: return agm(phi, s, t, sem.scale);
  }
  return {};
}

/// Three-valued verdict from the sign of the chosen score.
inline Status satisfies(const Formula& phi, const Trace& s, std::size_t t, const Semantics& sem) {
  return evaluate(phi, s, t, sem).status;
}

}  // namespace stlrob
