#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "toposlang/heyting.hpp"
#include "toposlang/rational.hpp"
#include "toposlang/subspace2d.hpp"

namespace toposlang::pl {

// --- interval sets ------------------------------------------------------------

/// An interval endpoint. `infinite` means -inf on a lower end and +inf on an
/// upper end; infinite endpoints are always open.
struct Endpoint {
  bool infinite = true;
  Rational value;
  bool closed = false;
  bool operator==(const Endpoint&) const = default;
};

struct Interval {
  Endpoint lo, hi;
  bool operator==(const Interval&) const = default;

  bool empty() const {
    if (lo.infinite || hi.infinite) return false;
    return lo.value > hi.value || (lo.value == hi.value && !(lo.closed && hi.closed));
  }
  bool contains(const Rational& q) const {
    const bool above = lo.infinite || q > lo.value || (lo.closed && q == lo.value);
    const bool below = hi.infinite || q < hi.value || (hi.closed && q == hi.value);
    return above && below;
  }
};

namespace detail {
// lower bounds: -inf first, then by value, closed before open
inline bool lower_less(const Endpoint& a, const Endpoint& b) {
  if (a.infinite != b.infinite) return a.infinite;
  if (a.infinite) return false;
  if (a.value != b.value) return a.value < b.value;
  return a.closed && !b.closed;
}
// upper bounds: +inf last, then by value, open before closed
inline bool upper_less(const Endpoint& a, const Endpoint& b) {
  if (a.infinite != b.infinite) return b.infinite;
  if (a.infinite) return false;
  if (a.value != b.value) return a.value < b.value;
  return !a.closed && b.closed;
}
inline std::string endpoint_text(const Endpoint& e, bool upper) {
  if (e.infinite) return upper ? "+inf" : "-inf";
  return format_rational(e.value);
}
}  // namespace detail

/// Finite union of rational intervals in normal form: sorted, nonempty,
/// pairwise disjoint, and no two intervals that could be merged.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> parts) : parts_(normalize(std::move(parts))) {}

  static IntervalSet empty_set() { return {}; }
  static IntervalSet real_line() { return IntervalSet({Interval{}}); }
  static IntervalSet closed(Rational a, Rational b) {
    return IntervalSet({Interval{{false, std::move(a), true}, {false, std::move(b), true}}});
  }
  static IntervalSet open(Rational a, Rational b) {
    return IntervalSet({Interval{{false, std::move(a), false}, {false, std::move(b), false}}});
  }
  static IntervalSet point(const Rational& a) { return closed(a, a); }

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  bool operator==(const IntervalSet&) const = default;

  bool member(const Rational& q) const {
    return std::any_of(parts_.begin(), parts_.end(), [&](const Interval& i) { return i.contains(q); });
  }

  friend IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
    std::vector<Interval> all = a.parts_;
    all.insert(all.end(), b.parts_.begin(), b.parts_.end());
    return IntervalSet(std::move(all));
  }

  friend IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
    std::vector<Interval> out;
    for (const auto& x : a.parts_)
      for (const auto& y : b.parts_)
        out.push_back({detail::lower_less(x.lo, y.lo) ? y.lo : x.lo, detail::upper_less(x.hi, y.hi) ? x.hi : y.hi});
    return IntervalSet(std::move(out));
  }

  IntervalSet complement() const {
    std::vector<Interval> out;
    Endpoint from;  // -inf
    for (const auto& i : parts_) {
      if (!i.lo.infinite) out.push_back({from, {false, i.lo.value, !i.lo.closed}});
      if (i.hi.infinite) return IntervalSet(std::move(out));
      from = {false, i.hi.value, !i.hi.closed};
    }
    out.push_back({from, Endpoint{}});
    return IntervalSet(std::move(out));
  }

  /// "[1,2) u (3,+inf)"; the empty set prints as "{}".
  std::string str() const {
    if (parts_.empty()) return "{}";
    std::vector<std::string> out;
    for (const auto& i : parts_)
      out.push_back(std::string(i.lo.closed ? "[" : "(") + detail::endpoint_text(i.lo, false) + "," +
                    detail::endpoint_text(i.hi, true) + (i.hi.closed ? "]" : ")"));
    return join(out, " u ");
  }

 private:
  static std::vector<Interval> normalize(std::vector<Interval> in) {
    std::vector<Interval> parts;
    for (auto& i : in) {
      if (i.lo.infinite) i.lo = Endpoint{};
      if (i.hi.infinite) i.hi = Endpoint{};
      if (!i.empty()) parts.push_back(std::move(i));
    }
    std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return detail::lower_less(a.lo, b.lo); });
    std::vector<Interval> out;
    for (auto& i : parts) {
      if (!out.empty()) {
        auto& cur = out.back();
        const bool touches = cur.hi.infinite || i.lo.infinite || i.lo.value < cur.hi.value ||
                             (i.lo.value == cur.hi.value && (i.lo.closed || cur.hi.closed));
        if (touches) {
          if (detail::upper_less(cur.hi, i.hi)) cur.hi = i.hi;
          continue;
        }
      }
      out.push_back(std::move(i));
    }
    return out;
  }

  std::vector<Interval> parts_;
};

// --- formulas -----------------------------------------------------------------

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// PL(S) syntax tree. An atom with a range is a primitive "A in Δ"; an atom
/// without one is an abstract propositional variable.
struct Formula {
  enum class Kind { Atom, Not, And, Or, Implies };
  Kind kind;
  std::string name;
  std::optional<IntervalSet> range;
  FormulaPtr lhs, rhs;
};

inline FormulaPtr atom(std::string name, std::optional<IntervalSet> range = std::nullopt) {
  return std::make_shared<const Formula>(Formula{Formula::Kind::Atom, std::move(name), std::move(range), {}, {}});
}
inline FormulaPtr neg(FormulaPtr a) { return std::make_shared<const Formula>(Formula{Formula::Kind::Not, {}, {}, std::move(a), {}}); }
inline FormulaPtr conj(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<const Formula>(Formula{Formula::Kind::And, {}, {}, std::move(a), std::move(b)});
}
inline FormulaPtr disj(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<const Formula>(Formula{Formula::Kind::Or, {}, {}, std::move(a), std::move(b)});
}
inline FormulaPtr impl(FormulaPtr a, FormulaPtr b) {
  return std::make_shared<const Formula>(Formula{Formula::Kind::Implies, {}, {}, std::move(a), std::move(b)});
}

inline bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  if (a->kind == Formula::Kind::Atom) return a->name == b->name && a->range == b->range;
  return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
}

namespace detail {
inline int precedence(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Implies: return 1;
    case Formula::Kind::Or: return 2;
    case Formula::Kind::And: return 3;
    case Formula::Kind::Not: return 4;
    case Formula::Kind::Atom: return 5;
  }
  return 0;
}
}  // namespace detail

/// Canonical text with minimal parentheses; `parse_pl` inverts it.
inline std::string to_string(const FormulaPtr& f) {
  using K = Formula::Kind;
  auto wrap = [](const FormulaPtr& g, bool paren) { return paren ? "(" + to_string(g) + ")" : to_string(g); };
  const int p = detail::precedence(f->kind);
  switch (f->kind) {
    case K::Atom: return f->range ? f->name + " in " + f->range->str() : f->name;
    case K::Not: return "~" + wrap(f->lhs, detail::precedence(f->lhs->kind) < p);
    case K::And:
    case K::Or: {
      const char* op = f->kind == K::And ? " & " : " | ";
      return wrap(f->lhs, detail::precedence(f->lhs->kind) < p) + op + wrap(f->rhs, detail::precedence(f->rhs->kind) <= p);
    }
    case K::Implies:
      return wrap(f->lhs, detail::precedence(f->lhs->kind) <= p) + " -> " +
             wrap(f->rhs, detail::precedence(f->rhs->kind) < p);
  }
  return "?";
}

/// Atoms in order of first occurrence, keyed by their printed form.
inline std::vector<FormulaPtr> atoms_of(const FormulaPtr& f) {
  std::vector<FormulaPtr> out;
  std::set<std::string> seen;
  std::function<void(const FormulaPtr&)> walk = [&](const FormulaPtr& g) {
    if (g->kind == Formula::Kind::Atom) {
      if (seen.insert(to_string(g)).second) out.push_back(g);
      return;
    }
    walk(g->lhs);
    if (g->rhs) walk(g->rhs);
  };
  walk(f);
  return out;
}

// --- parsing ------------------------------------------------------------------

namespace detail {

class PlParser {
 public:
  explicit PlParser(std::string_view s) : s_(s) {}

  FormulaPtr formula() {
    auto f = implication();
    ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return f;
  }

  IntervalSet interval_set_only() {
    auto r = interval_set();
    ws();
    if (pos_ != s_.size()) fail("trailing characters after interval set");
    return r;
  }

  bool normalized_input() const { return normalized_; }

 private:
  [[noreturn]] void fail(const std::string& m) const { throw ParseError(m, pos_); }
  void ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(std::string_view tok) {
    ws();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '@' || c == '.' || c == '\'';
  }
  bool keyword_ahead(std::string_view kw) {
    ws();
    if (s_.substr(pos_, kw.size()) != kw) return false;
    const std::size_t end = pos_ + kw.size();
    return end == s_.size() || !ident_char(s_[end]);
  }

  FormulaPtr implication() {
    auto lhs = disjunction();
    if (eat("->")) return impl(lhs, implication());
    return lhs;
  }
  FormulaPtr disjunction() {
    auto f = conjunction();
    while (eat("|")) f = disj(f, conjunction());
    return f;
  }
  FormulaPtr conjunction() {
    auto f = unary();
    while (eat("&")) f = conj(f, unary());
    return f;
  }
  FormulaPtr unary() {
    if (eat("~")) return neg(unary());
    if (eat("(")) {
      auto f = implication();
      if (!eat(")")) fail("expected ')'");
      return f;
    }
    ws();
    if (pos_ >= s_.size() || !ident_start(s_[pos_])) fail("expected a primitive proposition");
    const std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    std::string name(s_.substr(start, pos_ - start));
    if (name == "in" || name == "u") {
      pos_ = start;
      fail("'" + name + "' is reserved");
    }
    if (keyword_ahead("in")) {
      pos_ += 2;
      return atom(std::move(name), interval_set());
    }
    return atom(std::move(name));
  }

  IntervalSet interval_set() {
    if (eat("{}")) return IntervalSet::empty_set();
    std::vector<Interval> parts{interval()};
    while (keyword_ahead("u")) {
      ++pos_;
      parts.push_back(interval());
    }
    IntervalSet out(parts);
    if (out.parts() != parts) normalized_ = true;
    return out;
  }

  Interval interval() {
    ws();
    if (pos_ >= s_.size() || (s_[pos_] != '[' && s_[pos_] != '(')) fail("malformed interval literal: expected '[' or '('");
    Interval i;
    i.lo.closed = s_[pos_++] == '[';
    const std::size_t comma = s_.find(',', pos_);
    if (comma == std::string_view::npos) fail("malformed interval literal: missing ','");
    i.lo = endpoint(s_.substr(pos_, comma - pos_), i.lo.closed, false);
    pos_ = comma + 1;
    const std::size_t close = s_.find_first_of("])", pos_);
    if (close == std::string_view::npos) fail("malformed interval literal: missing ']' or ')'");
    const bool hi_closed = s_[close] == ']';
    i.hi = endpoint(s_.substr(pos_, close - pos_), hi_closed, true);
    pos_ = close + 1;
    return i;
  }

  Endpoint endpoint(std::string_view text, bool closed, bool upper) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text == "-inf" || text == "+inf" || text == "inf") {
      if (upper == (text == "-inf")) fail("malformed interval literal: '" + std::string(text) + "' on the wrong end");
      if (closed) fail("malformed interval literal: infinite endpoint must be open");
      return Endpoint{};
    }
    try {
      return Endpoint{false, parse_rational(text), closed};
    } catch (const Error&) {
      fail("malformed interval literal: bad endpoint '" + std::string(text) + "'");
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  bool normalized_ = false;
};

}  // namespace detail

inline FormulaPtr parse_pl(std::string_view text) { return detail::PlParser(text).formula(); }

/// Parses and reports whether some interval literal was not in normal form.
inline std::pair<FormulaPtr, bool> parse_pl_noting_normalization(std::string_view text) {
  detail::PlParser p(text);
  auto f = p.formula();
  return {f, p.normalized_input()};
}

inline IntervalSet parse_interval_set(std::string_view text) { return detail::PlParser(text).interval_set_only(); }

// --- Heyting-valued representation ---------------------------------------------

/// Recursive image of a formula: atoms via `assign` (returning nullopt for an
/// unassigned primitive), connectives via the algebra's operations.
template <heyting::HeytingStructure H, class Assign>
typename H::element_type pl_represent(const FormulaPtr& f, const H& algebra, const Assign& assign) {
  using K = Formula::Kind;
  switch (f->kind) {
    case K::Atom: {
      std::optional<typename H::element_type> v = assign(*f);
      if (!v) throw UnknownElementError("unassigned primitive '" + to_string(f) + "'");
      return *v;
    }
    case K::Not: return algebra.negate(pl_represent(f->lhs, algebra, assign));
    case K::And: return algebra.meet(pl_represent(f->lhs, algebra, assign), pl_represent(f->rhs, algebra, assign));
    case K::Or: return algebra.join(pl_represent(f->lhs, algebra, assign), pl_represent(f->rhs, algebra, assign));
    case K::Implies:
      return algebra.implies(pl_represent(f->lhs, algebra, assign), pl_represent(f->rhs, algebra, assign));
  }
  throw Error("internal", "unreachable formula kind");
}

/// Convenience: assignment by printed atom.
template <heyting::HeytingStructure H>
typename H::element_type pl_represent(const FormulaPtr& f, const H& algebra,
                                      const std::map<std::string, typename H::element_type>& table) {
  return pl_represent(f, algebra, [&](const Formula& a) -> std::optional<typename H::element_type> {
    auto it = table.find(to_string(std::make_shared<const Formula>(a)));
    if (it == table.end()) return std::nullopt;
    return it->second;
  });
}

// --- classical systems -------------------------------------------------------------

/// A finite state set with rational-valued quantities.
struct ClassicalSystem {
  std::vector<std::string> states;
  std::map<std::string, std::vector<Rational>> quantities;

  void validate() const {
    std::set<std::string> seen;
    for (const auto& s : states)
      if (!seen.insert(s).second) throw InvalidStructureError("duplicate state '" + s + "'");
    for (const auto& [name, values] : quantities)
      if (values.size() != states.size())
        throw InvalidStructureError("quantity '" + name + "' is not total: " + std::to_string(values.size()) +
                                    " values for " + std::to_string(states.size()) + " states");
  }
  std::size_t state_index(const std::string& s) const {
    auto it = std::find(states.begin(), states.end(), s);
    if (it == states.end()) throw UnknownElementError("unknown state '" + s + "'");
    return it - states.begin();
  }
  const std::vector<Rational>& quantity(const std::string& name) const {
    auto it = quantities.find(name);
    if (it == quantities.end()) throw UnknownElementError("unknown quantity '" + name + "'");
    return it->second;
  }

  /// Å⁻¹(Δ) as a subset of the states.
  Bitset preimage(const std::string& name, const IntervalSet& delta) const {
    const auto& vals = quantity(name);
    Bitset out(states.size());
    for (std::size_t s = 0; s < vals.size(); ++s)
      if (delta.member(vals[s])) out.set(s);
    return out;
  }
};

/// The classical representation: powerset of states, primitives to preimages.
struct ClassicalRep {
  heyting::PowersetAlgebra algebra;
  std::function<std::optional<Bitset>(const Formula&)> assign;
};

inline ClassicalRep classical_rep(const ClassicalSystem& sys) {
  sys.validate();
  return ClassicalRep{heyting::PowersetAlgebra(sys.states), [&sys](const Formula& a) -> std::optional<Bitset> {
                        if (!a.range) throw UnknownElementError("primitive '" + a.name + "' has no range");
                        return sys.preimage(a.name, *a.range);
                      }};
}

inline Bitset classical_represent(const FormulaPtr& f, const ClassicalSystem& sys) {
  auto rep = classical_rep(sys);
  return pl_represent(f, rep.algebra, rep.assign);
}

/// ν(φ; s) computed directly in {0,1}.
inline bool truth_value(const FormulaPtr& f, std::size_t state, const ClassicalSystem& sys) {
  if (state >= sys.states.size()) throw UnknownElementError("unknown state #" + std::to_string(state));
  using K = Formula::Kind;
  switch (f->kind) {
    case K::Atom:
      if (!f->range) throw UnknownElementError("primitive '" + f->name + "' has no range");
      return f->range->member(sys.quantity(f->name).at(state));
    case K::Not: return !truth_value(f->lhs, state, sys);
    case K::And: return truth_value(f->lhs, state, sys) && truth_value(f->rhs, state, sys);
    case K::Or: return truth_value(f->lhs, state, sys) || truth_value(f->rhs, state, sys);
    case K::Implies: return !truth_value(f->lhs, state, sys) || truth_value(f->rhs, state, sys);
  }
  return false;
}
inline bool truth_value(const FormulaPtr& f, const std::string& state, const ClassicalSystem& sys) {
  return truth_value(f, sys.state_index(state), sys);
}

struct AxiomFailure {
  std::string axiom;  // "conjunction" | "disjunction" | "negation"
  std::string quantity;
  std::string delta1, delta2;
};

struct OptionalAxiomReport {
  std::uint64_t checks = 0;
  std::vector<AxiomFailure> failures;
  bool ok() const { return failures.empty(); }
};

/// Candidate Δs for a quantity: intervals whose endpoints are attained values,
/// midpoints between them, or infinite, plus ∅ and the whole line.
inline std::vector<IntervalSet> interval_pool(const std::vector<Rational>& values) {
  std::vector<Rational> pts(values.begin(), values.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<Endpoint> ends{Endpoint{}};
  std::vector<Rational> cuts;
  if (!pts.empty()) cuts.push_back(pts.front() - 1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    cuts.push_back(pts[i]);
    cuts.push_back(i + 1 < pts.size() ? Rational((pts[i] + pts[i + 1]) / 2) : Rational(pts[i] + 1));
  }
  std::vector<IntervalSet> pool{IntervalSet::empty_set(), IntervalSet::real_line()};
  for (std::size_t i = 0; i <= cuts.size(); ++i)
    for (std::size_t j = i; j <= cuts.size(); ++j)
      for (int mode = 0; mode < 4; ++mode) {
        Endpoint lo = i == 0 ? Endpoint{} : Endpoint{false, cuts[i - 1], bool(mode & 1)};
        Endpoint hi = j == cuts.size() ? Endpoint{} : Endpoint{false, cuts[j], bool(mode & 2)};
        IntervalSet s({Interval{lo, hi}});
        if (std::find(pool.begin(), pool.end(), s) == pool.end()) pool.push_back(s);
      }
  return pool;
}

/// Checks, for sampled Δ₁, Δ₂ and every quantity A, that the representation
/// sends A∈Δ₁ ∧ A∈Δ₂ to π(A∈Δ₁∩Δ₂), A∈Δ₁ ∨ A∈Δ₂ to π(A∈Δ₁∪Δ₂) and
/// ¬(A∈Δ₁) to π(A∈(ℝ∖Δ₁)). Pairs involving ∅ and ℝ are always included.
inline OptionalAxiomReport check_optional_axioms(const ClassicalSystem& sys, std::size_t samples = 200,
                                                 std::uint64_t seed = 1) {
  sys.validate();
  OptionalAxiomReport r;
  std::mt19937_64 rng(seed);
  for (const auto& [name, values] : sys.quantities) {
    const auto pool = interval_pool(values);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t fixed : {0, 1}) {  // ∅ and ℝ against everything
        pairs.emplace_back(i, fixed);
        pairs.emplace_back(fixed, i);
      }
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::size_t k = 0; k < samples; ++k) pairs.emplace_back(pick(rng), pick(rng));
    for (auto [i, j] : pairs) {
      const auto &d1 = pool[i], &d2 = pool[j];
      auto a1 = atom(name, d1), a2 = atom(name, d2);
      auto fail = [&](const char* ax) { r.failures.push_back({ax, name, d1.str(), d2.str()}); };
      ++r.checks;
      if (classical_represent(conj(a1, a2), sys) != classical_represent(atom(name, intersect(d1, d2)), sys))
        fail("conjunction");
      if (classical_represent(disj(a1, a2), sys) != classical_represent(atom(name, unite(d1, d2)), sys))
        fail("disjunction");
      if (classical_represent(neg(a1), sys) != classical_represent(atom(name, d1.complement()), sys)) fail("negation");
    }
  }
  return r;
}

// --- Hilbert proofs -----------------------------------------------------------------

/// The axiom schemas, with metavariables a, b, c.
inline const std::vector<std::pair<std::string, FormulaPtr>>& hilbert_schemas() {
  static const std::vector<std::pair<std::string, FormulaPtr>> schemas = [] {
    std::vector<std::pair<std::string, FormulaPtr>> s;
    for (const auto& [name, text] : std::vector<std::pair<std::string, std::string>>{
             {"K", "a -> b -> a"},
             {"S", "(a -> b -> c) -> (a -> b) -> a -> c"},
             {"AndI", "a -> b -> a & b"},
             {"AndE1", "a & b -> a"},
             {"AndE2", "a & b -> b"},
             {"OrI1", "a -> a | b"},
             {"OrI2", "b -> a | b"},
             {"OrE", "(a -> c) -> (b -> c) -> a | b -> c"},
             {"NegI", "(a -> b) -> (a -> ~b) -> ~a"},
             {"ExF", "~a -> a -> b"}})
      s.emplace_back(name, parse_pl(text));
    return s;
  }();
  return schemas;
}

/// Matches `f` against a schema, binding metavariables consistently.
inline bool match_schema(const FormulaPtr& pattern, const FormulaPtr& f, std::map<std::string, FormulaPtr>& bind) {
  if (pattern->kind == Formula::Kind::Atom) {
    auto [it, fresh] = bind.emplace(pattern->name, f);
    return fresh || equal(it->second, f);
  }
  if (pattern->kind != f->kind) return false;
  if (!match_schema(pattern->lhs, f->lhs, bind)) return false;
  return !pattern->rhs || match_schema(pattern->rhs, f->rhs, bind);
}

inline std::optional<std::string> schema_of(const FormulaPtr& f) {
  for (const auto& [name, pat] : hilbert_schemas()) {
    std::map<std::string, FormulaPtr> bind;
    if (match_schema(pat, f, bind)) return name;
  }
  return std::nullopt;
}

/// Instantiates a schema; `bind` must cover its metavariables.
inline FormulaPtr instantiate(const FormulaPtr& pattern, const std::map<std::string, FormulaPtr>& bind) {
  using K = Formula::Kind;
  switch (pattern->kind) {
    case K::Atom: return bind.at(pattern->name);
    case K::Not: return neg(instantiate(pattern->lhs, bind));
    case K::And: return conj(instantiate(pattern->lhs, bind), instantiate(pattern->rhs, bind));
    case K::Or: return disj(instantiate(pattern->lhs, bind), instantiate(pattern->rhs, bind));
    case K::Implies: return impl(instantiate(pattern->lhs, bind), instantiate(pattern->rhs, bind));
  }
  throw Error("internal", "unreachable formula kind");
}

inline FormulaPtr schema_instance(const std::string& schema, const std::map<std::string, FormulaPtr>& bind) {
  for (const auto& [name, pat] : hilbert_schemas())
    if (name == schema) return instantiate(pat, bind);
  throw UnknownElementError("unknown schema '" + schema + "'");
}

struct ProofLine {
  FormulaPtr formula;
  std::string rule;    // "axiom" or "mp"
  std::string schema;  // optional for axiom lines
  std::size_t major = 0, minor = 0;  // mp: 1-based lines holding α and α -> β
};

struct HilbertProof {
  std::vector<ProofLine> lines;
  FormulaPtr goal;  // optional: defaults to the last line
};

struct ProofVerdict {
  bool accepted = false;
  std::size_t line = 0;  // first bad line, 1-based; 0 when accepted or empty
  std::string message;
  std::vector<std::string> schemas;  // per line: matched schema or "mp"
};

inline ProofVerdict check_proof(const HilbertProof& proof) {
  ProofVerdict v;
  auto reject = [&](std::size_t line, std::string msg) {
    v.accepted = false;
    v.line = line;
    v.message = std::move(msg);
    return v;
  };
  if (proof.lines.empty()) return reject(0, "empty proof");
  for (std::size_t i = 0; i < proof.lines.size(); ++i) {
    const auto& l = proof.lines[i];
    const std::size_t n = i + 1;
    if (l.rule == "axiom") {
      if (!l.schema.empty()) {
        const auto& all = hilbert_schemas();
        auto it = std::find_if(all.begin(), all.end(), [&](const auto& s) { return s.first == l.schema; });
        if (it == all.end()) return reject(n, "unknown schema '" + l.schema + "'");
        std::map<std::string, FormulaPtr> bind;
        if (!match_schema(it->second, l.formula, bind)) return reject(n, "not an instance of " + l.schema);
        v.schemas.push_back(l.schema);
      } else if (auto s = schema_of(l.formula)) {
        v.schemas.push_back(*s);
      } else {
        return reject(n, "not an instance of any axiom schema");
      }
    } else if (l.rule == "mp") {
      if (l.major == 0 || l.minor == 0 || l.major >= n || l.minor >= n)
        return reject(n, "modus ponens must cite two earlier lines");
      const auto& a = proof.lines[l.major - 1].formula;
      const auto& ab = proof.lines[l.minor - 1].formula;
      if (ab->kind != Formula::Kind::Implies || !equal(ab->lhs, a) || !equal(ab->rhs, l.formula))
        return reject(n, "modus ponens does not apply to lines " + std::to_string(l.major) + " and " +
                             std::to_string(l.minor));
      v.schemas.push_back("mp");
    } else {
      return reject(n, "unknown rule '" + l.rule + "'");
    }
  }
  if (proof.goal && !equal(proof.goal, proof.lines.back().formula))
    return reject(proof.lines.size(), "last line is not the goal");
  v.accepted = true;
  return v;
}

/// The five-line K/S derivation of α -> α.
inline HilbertProof identity_proof(const FormulaPtr& a) {
  const auto aa = impl(a, a);
  HilbertProof p;
  p.lines.push_back({schema_instance("S", {{"a", a}, {"b", aa}, {"c", a}}), "axiom", "S"});
  p.lines.push_back({schema_instance("K", {{"a", a}, {"b", aa}}), "axiom", "K"});
  p.lines.push_back({impl(impl(a, aa), aa), "mp", "", 2, 1});
  p.lines.push_back({schema_instance("K", {{"a", a}, {"b", a}}), "axiom", "K"});
  p.lines.push_back({aa, "mp", "", 4, 3});
  p.goal = aa;
  return p;
}

// --- Kripke models --------------------------------------------------------------------

/// Finite rooted Kripke model: world 0 is the root and lies below every world.
/// `above[w]` has bit v set iff w <= v. Valuations are upward closed.
struct KripkeModel {
  std::size_t worlds = 0;
  std::vector<std::uint32_t> above;
  std::map<std::string, std::uint32_t> valuation;  // by printed atom

  bool monotone() const {
    for (const auto& [_, set] : valuation)
      for (std::size_t w = 0; w < worlds; ++w)
        if ((set >> w & 1) && (above[w] & set) != above[w]) return false;
    return true;
  }

  /// The set of worlds forcing `f`.
  std::uint32_t forced(const FormulaPtr& f) const {
    using K = Formula::Kind;
    const std::uint32_t all = (std::uint32_t{1} << worlds) - 1;
    switch (f->kind) {
      case K::Atom: {
        auto it = valuation.find(to_string(f));
        return it == valuation.end() ? 0 : it->second;
      }
      case K::And: return forced(f->lhs) & forced(f->rhs);
      case K::Or: return forced(f->lhs) | forced(f->rhs);
      case K::Not:
      case K::Implies: {
        const std::uint32_t a = forced(f->lhs), b = f->kind == K::Not ? 0 : forced(f->rhs);
        std::uint32_t out = 0;
        for (std::size_t w = 0; w < worlds; ++w)
          if ((above[w] & a & ~b & all) == 0) out |= std::uint32_t{1} << w;
        return out;
      }
    }
    return 0;
  }
  bool forces(std::size_t w, const FormulaPtr& f) const { return forced(f) >> w & 1; }
};

/// Searches rooted posets of up to `max_worlds` worlds (smallest first) for a
/// model whose root does not force `f`. Gives up after `budget` models.
inline std::optional<KripkeModel> find_countermodel(const FormulaPtr& f, std::size_t max_worlds = 4,
                                                    std::uint64_t budget = 20'000'000) {
  const auto atoms = atoms_of(f);
  std::vector<std::string> keys;
  for (const auto& a : atoms) keys.push_back(to_string(a));
  std::uint64_t tried = 0;
  for (std::size_t n = 1; n <= max_worlds; ++n) {
    // orders compatible with 0 < 1 < ... < n-1 as a linear extension
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
      std::vector<std::uint32_t> above(n);
      for (std::size_t w = 0; w < n; ++w) above[w] = std::uint32_t{1} << w;
      above[0] = (std::uint32_t{1} << n) - 1;
      for (std::size_t k = 0; k < pairs.size(); ++k)
        if (mask >> k & 1) above[pairs[k].first] |= std::uint32_t{1} << pairs[k].second;
      bool transitive = true;
      for (std::size_t u = 0; u < n && transitive; ++u)
        for (std::size_t v = 0; v < n; ++v)
          if ((above[u] >> v & 1) && (above[v] & ~above[u])) transitive = false;
      if (!transitive) continue;
      std::vector<std::uint32_t> ups;
      for (std::uint32_t s = 0; s < (std::uint32_t{1} << n); ++s) {
        bool up = true;
        for (std::size_t w = 0; w < n && up; ++w)
          if ((s >> w & 1) && (above[w] & s) != above[w]) up = false;
        if (up) ups.push_back(s);
      }
      KripkeModel m{n, above, {}};
      std::vector<std::size_t> choice(keys.size(), 0);
      while (true) {
        if (++tried > budget) return std::nullopt;
        for (std::size_t k = 0; k < keys.size(); ++k) m.valuation[keys[k]] = ups[choice[k]];
        if (!m.forces(0, f)) return m;
        std::size_t k = 0;
        while (k < choice.size() && ++choice[k] == ups.size()) choice[k++] = 0;
        if (k == choice.size()) break;
      }
    }
  }
  return std::nullopt;
}

// --- intuitionistic decision ---------------------------------------------------------

namespace detail {

/// Contraction-free sequent calculus (G4ip) over hash-consed formulas with ⊥.
class G4ip {
 public:
  explicit G4ip(std::size_t cap) : cap_(cap) { bot_ = intern({Node::Bot, 0, 0, 0}); }

  int convert(const FormulaPtr& f) {
    using K = Formula::Kind;
    switch (f->kind) {
      case K::Atom: {
        auto [it, _] = atom_ids_.emplace(to_string(f), atom_ids_.size());
        return intern({Node::Atom, it->second, 0, 0});
      }
      case K::Not: return intern({Node::Imp, 0, convert(f->lhs), bot_});
      case K::And: return intern({Node::And, 0, convert(f->lhs), convert(f->rhs)});
      case K::Or: return intern({Node::Or, 0, convert(f->lhs), convert(f->rhs)});
      case K::Implies: return intern({Node::Imp, 0, convert(f->lhs), convert(f->rhs)});
    }
    return bot_;
  }

  bool prove(std::vector<int> gamma, int goal) {
    std::sort(gamma.begin(), gamma.end());
    gamma.erase(std::unique(gamma.begin(), gamma.end()), gamma.end());
    auto key = std::make_pair(gamma, goal);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (++visited_ > cap_) throw CapExceededError("proof search exceeds " + std::to_string(cap_) + " sequents");
    const bool r = search(gamma, goal);
    memo_.emplace(std::move(key), r);
    return r;
  }

 private:
  struct Node {
    enum Kind { Atom, Bot, And, Or, Imp } kind;
    int atom, l, r;
    auto tie() const { return std::tie(kind, atom, l, r); }
    bool operator<(const Node& o) const { return tie() < o.tie(); }
  };

  int intern(Node n) {
    auto [it, fresh] = ids_.emplace(n, nodes_.size());
    if (fresh) nodes_.push_back(n);
    return it->second;
  }

  static std::vector<int> without(const std::vector<int>& g, std::size_t i, std::initializer_list<int> add) {
    std::vector<int> out;
    out.reserve(g.size() + add.size());
    for (std::size_t k = 0; k < g.size(); ++k)
      if (k != i) out.push_back(g[k]);
    out.insert(out.end(), add);
    return out;
  }

  bool search(const std::vector<int>& g, int goal) {
    const auto in = [&](int x) { return std::binary_search(g.begin(), g.end(), x); };
    if (in(bot_) || in(goal)) return true;
    // invertible left rules
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Node n = nodes_[g[i]];
      if (n.kind == Node::And) return prove(without(g, i, {n.l, n.r}), goal);
      if (n.kind == Node::Or) return prove(without(g, i, {n.l}), goal) && prove(without(g, i, {n.r}), goal);
      if (n.kind == Node::Imp) {
        const Node a = nodes_[n.l];
        if (a.kind == Node::Atom && in(n.l)) return prove(without(g, i, {n.r}), goal);
        if (a.kind == Node::Bot) return prove(without(g, i, {}), goal);
        if (a.kind == Node::And) return prove(without(g, i, {intern({Node::Imp, 0, a.l, intern({Node::Imp, 0, a.r, n.r})})}), goal);
        if (a.kind == Node::Or)
          return prove(without(g, i, {intern({Node::Imp, 0, a.l, n.r}), intern({Node::Imp, 0, a.r, n.r})}), goal);
      }
    }
    // invertible right rules
    const Node G = nodes_[goal];
    if (G.kind == Node::And) return prove(g, G.l) && prove(g, G.r);
    if (G.kind == Node::Imp) {
      auto g2 = g;
      g2.push_back(G.l);
      return prove(std::move(g2), G.r);
    }
    // non-invertible choices
    if (G.kind == Node::Or && (prove(g, G.l) || prove(g, G.r))) return true;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Node n = nodes_[g[i]];
      if (n.kind != Node::Imp || nodes_[n.l].kind != Node::Imp) continue;
      const Node cd = nodes_[n.l];  // (C -> D) -> B
      if (prove(without(g, i, {intern({Node::Imp, 0, cd.r, n.r}), cd.l}), cd.r) && prove(without(g, i, {n.r}), goal))
        return true;
    }
    return false;
  }

  std::size_t cap_;
  std::size_t visited_ = 0;
  int bot_;
  std::vector<Node> nodes_;
  std::map<Node, int> ids_;
  std::map<std::string, int> atom_ids_;
  std::map<std::pair<std::vector<int>, int>, bool> memo_;
};

}  // namespace detail

struct IpcVerdict {
  bool valid = false;
  std::optional<KripkeModel> countermodel;  // confirmed; absent if none within the search bound
};

inline constexpr std::size_t kDefaultProofSearchCap = 2'000'000;

/// Intuitionistic validity of a formula whose primitives are read as opaque
/// propositional variables. Invalid verdicts come with a countermodel of at
/// most four worlds when one exists.
inline IpcVerdict decide_ipc(const FormulaPtr& f, std::size_t cap = kDefaultProofSearchCap) {
  detail::G4ip prover(cap);
  IpcVerdict v;
  v.valid = prover.prove({}, prover.convert(f));
  if (!v.valid) {
    v.countermodel = find_countermodel(f);
    if (v.countermodel && (v.countermodel->forces(0, f) || !v.countermodel->monotone()))
      throw Error("internal", "countermodel failed confirmation");
  }
  return v;
}

// --- the two-dimensional non-distributivity witness ---------------------------------

struct NondistributivityReport {
  std::string a, b, c;
  std::string b_join_c, a_meet_b, a_meet_c;
  std::string lhs, rhs;  // a∧(b∨c) and (a∧b)∨(a∧c)
  bool distributivity_fails = false;
  std::string consequence;
};

inline NondistributivityReport quantum_nondistributivity_demo() {
  using heyting::Subspace2D;
  const auto ra = Subspace2D::ray(1, 0), rb = Subspace2D::ray(0, 1), rc = Subspace2D::ray(1, 1);
  heyting::SubspaceLattice2D L({ra, rb, rc});
  const auto a = L.index_of(ra), b = L.index_of(rb), c = L.index_of(rc);
  NondistributivityReport r;
  r.a = L.label(a);
  r.b = L.label(b);
  r.c = L.label(c);
  r.b_join_c = L.label(L.join(b, c));
  r.a_meet_b = L.label(L.meet(a, b));
  r.a_meet_c = L.label(L.meet(a, c));
  const auto lhs = L.meet(a, L.join(b, c)), rhs = L.join(L.meet(a, b), L.meet(a, c));
  r.lhs = L.label(lhs);
  r.rhs = L.label(rhs);
  r.distributivity_fails = lhs != rhs && lhs == a && rhs == L.bottom();
  r.consequence =
      "the subspace lattice is not distributive, so no assignment of propositions to subspaces that preserves "
      "meets and joins can satisfy the distributive law required of a Heyting algebra";
  return r;
}

}  // namespace toposlang::pl
