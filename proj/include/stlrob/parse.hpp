#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stlrob/error.hpp"
#include "stlrob/formula.hpp"

namespace stlrob {

/// Named atoms (e.g. rectangular regions) that expand to a formula at parse time.
using AtomTable = std::map<std::string, Formula, std::less<>>;

/// Open interval lo < channel < hi, in normalized units.
struct AxisInterval {
  std::string channel;
  double lo = 0.0;
  double hi = 0.0;
};

/// Conjunction of `lo < c` and `c < hi` for every axis: an axis-aligned box.
inline Formula box_region(const std::vector<AxisInterval>& axes) {
  std::vector<Formula> preds;
  for (const auto& ax : axes) {
    if (!(ax.lo < ax.hi)) {
      throw DomainError("region interval on '" + ax.channel + "' is empty");
    }
    preds.push_back(Formula::predicate(ax.channel, Comparison::Greater, ax.lo));
    preds.push_back(Formula::predicate(ax.channel, Comparison::Less, ax.hi));
  }
  return Formula::conjunction(std::move(preds));
}

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, const AtomTable& atoms) : text_(text), atoms_(atoms) {}

  Formula run() {
    Formula f = implication();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  // implication := disj ("->" implication)?
  Formula implication() {
    Formula lhs = disjunction();
    if (accept("->")) return Formula::implies(std::move(lhs), implication());
    return lhs;
  }

  Formula disjunction() {
    std::vector<Formula> subs;
    subs.push_back(conjunction());
    while (accept("||")) subs.push_back(conjunction());
    return subs.size() == 1 ? std::move(subs.front()) : Formula::disjunction(std::move(subs));
  }

  Formula conjunction() {
    std::vector<Formula> subs;
    subs.push_back(unary());
    while (accept("&&")) subs.push_back(unary());
    return subs.size() == 1 ? std::move(subs.front()) : Formula::conjunction(std::move(subs));
  }

  Formula unary() {
    skip_ws();
    if (accept("!")) return Formula::negation(unary());
    if (temporal_ahead('G')) {
      auto [a, b] = interval();
      return Formula::globally(a, b, unary());
    }
    if (temporal_ahead('F')) {
      auto [a, b] = interval();
      return Formula::eventually(a, b, unary());
    }
    Formula lhs = atom();
    if (temporal_ahead('U')) {
      auto [a, b] = interval();
      Formula rhs = atom();
      return Formula::until(a, b, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  Formula atom() {
    skip_ws();
    if (accept("(")) {
      Formula f = implication();
      expect(")");
      return f;
    }
    std::size_t start = pos_;
    std::string name = identifier();
    if (name == "true") return Formula::top();
    if (name == "false") return Formula::bottom();
    skip_ws();
    if (pos_ < text_.size() && (text_[pos_] == '>' || text_[pos_] == '<')) {
      Comparison cmp = text_[pos_] == '>' ? Comparison::Greater : Comparison::Less;
      ++pos_;
      skip_ws();
      std::size_t num_pos = pos_;
      double v = number();
      if (!(v >= -1.0 && v <= 1.0)) {
        throw ParseError("threshold " + Formula::format_number(v) + " outside [-1,1]", num_pos);
      }
      return Formula::predicate(std::move(name), cmp, v);
    }
    auto it = atoms_.find(name);
    if (it == atoms_.end()) throw ParseError("unknown atom '" + name + "'", start);
    return it->second;
  }

  std::pair<int, int> interval() {
    // the operator letter has been consumed; positioned at '['
    std::size_t open = pos_;
    expect("[");
    int a = integer();
    expect(",");
    int b = integer();
    expect("]");
    if (b <= a) {
      throw ParseError("interval upper bound must exceed lower bound", open);
    }
    return {a, b};
  }

  bool temporal_ahead(char letter) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != letter) return false;
    std::size_t p = pos_ + 1;
    while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
    if (p >= text_.size() || text_[p] != '[') return false;
    pos_ = p;
    return true;
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    if (pos_ >= text_.size() ||
        !(std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      fail(pos_ >= text_.size() ? "unexpected end of input" : "expected an atom");
    }
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    double v = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{}) fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return v;
  }

  int integer() {
    skip_ws();
    int v = 0;
    const char* first = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
    if (ec != std::errc{}) fail("expected a non-negative integer");
    if (v < 0) fail("interval bounds must be non-negative");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    skip_ws();
    return v;
  }

  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  std::string_view text_;
  const AtomTable& atoms_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses the textual grammar into a Formula. Identifiers without a
/// comparison are looked up in `atoms` and replaced by their expansion.
inline Formula parse(std::string_view text, const AtomTable& atoms = {}) {
  return detail::Parser(text, atoms).run();
}

}  // namespace stlrob
