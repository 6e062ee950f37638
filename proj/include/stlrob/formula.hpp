#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "stlrob/error.hpp"

namespace stlrob {

enum class Op { True, False, Predicate, Not, And, Or, Globally, Eventually, Until };

enum class Comparison { Greater, Less };

/// STL abstract syntax tree node.
///
/// Nodes are built through the static factories, which enforce the structural
/// invariants: predicate thresholds in [-1,1], at least two operands for
/// And/Or, and 0 <= a < b for every temporal interval. Once built a Formula is
/// immutable and may be shared freely between threads.
class Formula {
 public:
  static Formula top() { return Formula(Op::True); }
  static Formula bottom() { return Formula(Op::False); }

  static Formula predicate(std::string channel, Comparison cmp, double threshold) {
    if (channel.empty()) throw DomainError("predicate channel name is empty");
    if (!(threshold >= -1.0 && threshold <= 1.0)) {
      throw DomainError("predicate threshold " + format_number(threshold) +
                        " outside [-1,1]");
    }
    Formula f(Op::Predicate);
    f.channel_ = std::move(channel);
    f.cmp_ = cmp;
    f.threshold_ = threshold;
    return f;
  }

  static Formula negation(Formula sub) {
    Formula f(Op::Not);
    f.children_.push_back(std::move(sub));
    return f;
  }

  static Formula conjunction(std::vector<Formula> subs) { return nary(Op::And, std::move(subs)); }
  static Formula disjunction(std::vector<Formula> subs) { return nary(Op::Or, std::move(subs)); }

  static Formula globally(int a, int b, Formula sub) {
    return temporal(Op::Globally, a, b, {std::move(sub)});
  }
  static Formula eventually(int a, int b, Formula sub) {
    return temporal(Op::Eventually, a, b, {std::move(sub)});
  }
  static Formula until(int a, int b, Formula lhs, Formula rhs) {
    return temporal(Op::Until, a, b, {std::move(lhs), std::move(rhs)});
  }

  /// ¬lhs ∨ rhs
  static Formula implies(Formula lhs, Formula rhs) {
    return disjunction({negation(std::move(lhs)), std::move(rhs)});
  }

  Op op() const noexcept { return op_; }
  const std::string& channel() const noexcept { return channel_; }
  Comparison comparison() const noexcept { return cmp_; }
  double threshold() const noexcept { return threshold_; }
  int lower() const noexcept { return a_; }
  int upper() const noexcept { return b_; }
  const std::vector<Formula>& children() const noexcept { return children_; }
  const Formula& child(std::size_t i = 0) const { return children_.at(i); }

  bool is_temporal() const noexcept {
    return op_ == Op::Globally || op_ == Op::Eventually || op_ == Op::Until;
  }

  bool operator==(const Formula&) const = default;

  /// Shortest decimal representation that reads back to the same double.
  static std::string format_number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
  }

 private:
  explicit Formula(Op op) : op_(op) {}

  static Formula nary(Op op, std::vector<Formula> subs) {
    if (subs.size() < 2) {
      throw DomainError(std::string(op == Op::And ? "conjunction" : "disjunction") +
                        " needs at least two operands");
    }
    Formula f(op);
    f.children_ = std::move(subs);
    return f;
  }

  static Formula temporal(Op op, int a, int b, std::vector<Formula> subs) {
    if (a < 0 || b <= a) {
      throw DomainError("temporal interval [" + std::to_string(a) + "," + std::to_string(b) +
                        "] must satisfy b > a >= 0");
    }
    Formula f(op);
    f.a_ = a;
    f.b_ = b;
    f.children_ = std::move(subs);
    return f;
  }

  Op op_;
  std::string channel_;
  Comparison cmp_ = Comparison::Greater;
  double threshold_ = 0.0;
  int a_ = 0;
  int b_ = 0;
  std::vector<Formula> children_;
};

/// Largest time offset (relative to the evaluation time) whose signal value
/// the formula can read.
inline int horizon(const Formula& phi) {
  switch (phi.op()) {
    case Op::True:
    case Op::False:
    case Op::Predicate:
      return 0;
    case Op::Not:
      return horizon(phi.child());
    case Op::And:
    case Op::Or: {
      int h = 0;
      for (const auto& c : phi.children()) h = std::max(h, horizon(c));
      return h;
    }
    case Op::Globally:
    case Op::Eventually:
    case Op::Until: {
      int h = 0;
      for (const auto& c : phi.children()) h = std::max(h, horizon(c));
      return phi.upper() + h;
    }
  }
  return 0;
}

/// Every channel name referenced by a predicate, in first-use order.
inline std::vector<std::string> channels(const Formula& phi) {
  std::vector<std::string> out;
  auto walk = [&](auto&& self, const Formula& f) -> void {
    if (f.op() == Op::Predicate &&
        std::find(out.begin(), out.end(), f.channel()) == out.end()) {
      out.push_back(f.channel());
    }
    for (const auto& c : f.children()) self(self, c);
  };
  walk(walk, phi);
  return out;
}

inline bool contains(const Formula& phi, Op op) {
  if (phi.op() == op) return true;
  return std::any_of(phi.children().begin(), phi.children().end(),
                     [op](const Formula& c) { return contains(c, op); });
}

/// Fully parenthesized text in the concrete grammar; parse(to_string(f)) == f.
inline std::string to_string(const Formula& phi) {
  auto interval = [&](const char* name) {
    return std::string(name) + "[" + std::to_string(phi.lower()) + "," +
           std::to_string(phi.upper()) + "]";
  };
  auto join = [&](const char* sep) {
    std::string s = "(";
    for (std::size_t i = 0; i < phi.children().size(); ++i) {
      if (i) s += sep;
      s += to_string(phi.children()[i]);
    }
    return s + ")";
  };
  switch (phi.op()) {
    case Op::True: return "true";
    case Op::False: return "false";
    case Op::Predicate:
      return "(" + phi.channel() + (phi.comparison() == Comparison::Greater ? " > " : " < ") +
             Formula::format_number(phi.threshold()) + ")";
    case Op::Not: return "!" + to_string(phi.child());
    case Op::And: return join(" && ");
    case Op::Or: return join(" || ");
    case Op::Globally: return "(" + interval("G") + " " + to_string(phi.child()) + ")";
    case Op::Eventually: return "(" + interval("F") + " " + to_string(phi.child()) + ")";
    case Op::Until:
      return "((" + to_string(phi.child(0)) + ") " + interval("U") + " (" +
             to_string(phi.child(1)) + "))";
  }
  return {};
}

}  // namespace stlrob
