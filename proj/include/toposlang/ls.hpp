#pragma once
// The typed local language L(S): types, terms, a concrete syntax, type
// inference, derived connectives, substitution, sequent axioms, a small
// derivation checker and the abelian-group axiom pack.

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "toposlang/common.hpp"

namespace toposlang::ls {

// --- types ----------------------------------------------------------------------

struct Type {
  enum class Kind { Unit, Omega, Sigma, R, Ground, Product, Power };
  Kind kind = Kind::Unit;
  std::string name;         // Ground
  std::vector<Type> args;   // Product factors, or the single Power argument

  bool operator==(const Type&) const = default;
  bool operator<(const Type& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (name != o.name) return name < o.name;
    return std::lexicographical_compare(args.begin(), args.end(), o.args.begin(), o.args.end());
  }

  static Type unit() { return {}; }
  static Type omega() { return {Kind::Omega, "", {}}; }
  static Type sigma() { return {Kind::Sigma, "", {}}; }
  static Type r() { return {Kind::R, "", {}}; }
  static Type ground(std::string n) { return {Kind::Ground, std::move(n), {}}; }
  /// The empty product is 1.
  static Type product(std::vector<Type> ts) {
    if (ts.empty()) return unit();
    return {Kind::Product, "", std::move(ts)};
  }
  static Type power(Type t) { return {Kind::Power, "", {std::move(t)}}; }
};

inline std::string to_string(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Unit: return "1";
    case Type::Kind::Omega: return "Omega";
    case Type::Kind::Sigma: return "Sigma";
    case Type::Kind::R: return "R";
    case Type::Kind::Ground: return t.name;
    case Type::Kind::Power: return "P(" + to_string(t.args[0]) + ")";
    case Type::Kind::Product: {
      std::vector<std::string> parts;
      for (const auto& a : t.args) parts.push_back(a.kind == Type::Kind::Product ? "(" + to_string(a) + ")" : to_string(a));
      return join(parts, " * ");
    }
  }
  return "?";
}

/// Ground type names occurring in `t` (Sigma and R included).
inline void grounds_of(const Type& t, std::set<std::string>& out) {
  if (t.kind == Type::Kind::Sigma) out.insert("Sigma");
  if (t.kind == Type::Kind::R) out.insert("R");
  if (t.kind == Type::Kind::Ground) out.insert(t.name);
  for (const auto& a : t.args) grounds_of(a, out);
}

// --- signatures -----------------------------------------------------------------

struct Symbol {
  Type dom, cod;
};

/// Ground types (Sigma and R always present) and typed function symbols.
struct Signature {
  std::set<std::string> grounds{"Sigma", "R"};
  std::map<std::string, Symbol> symbols;

  Signature& ground(const std::string& g) {
    grounds.insert(g);
    return *this;
  }
  Signature& symbol(const std::string& name, Type dom, Type cod) {
    if (!symbols.emplace(name, Symbol{std::move(dom), std::move(cod)}).second)
      throw InvalidStructureError("duplicate function symbol `" + name + "`");
    return *this;
  }
  const Symbol& at(const std::string& name) const {
    auto it = symbols.find(name);
    if (it == symbols.end()) throw UnknownElementError("unknown function symbol `" + name + "`");
    return it->second;
  }
  /// F(Σ,R): the physical quantities.
  std::vector<std::string> quantities() const {
    std::vector<std::string> out;
    for (const auto& [n, s] : symbols)
      if (s.dom == Type::sigma() && s.cod == Type::r()) out.push_back(n);
    return out;
  }
  void validate() const {
    for (const auto& [n, s] : symbols) {
      std::set<std::string> gs;
      grounds_of(s.dom, gs);
      grounds_of(s.cod, gs);
      for (const auto& g : gs)
        if (!grounds.count(g)) throw InvalidStructureError("symbol `" + n + "` uses undeclared ground type `" + g + "`");
    }
    if (quantities().empty()) throw InvalidStructureError("signature has no symbol of type Sigma -> R");
  }
};

// --- terms ------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Core forms Var..In; the remaining kinds are surface connectives removed by
/// desugar().
struct Term {
  enum class Kind { Var, Star, App, Tuple, Proj, Compr, Eq, In, True, False, Not, And, Or, Implies, Iff, Forall, Exists };
  Kind kind = Kind::Star;
  std::string name;  // variable, bound variable or symbol
  Type type;         // type of Var or of the bound variable
  std::size_t index = 0;  // Proj, 1-based
  std::vector<TermPtr> args;
};

inline bool is_binder(Term::Kind k) {
  return k == Term::Kind::Compr || k == Term::Kind::Forall || k == Term::Kind::Exists;
}
inline bool is_surface(Term::Kind k) { return k >= Term::Kind::True; }

inline TermPtr mk(Term t) { return std::make_shared<const Term>(std::move(t)); }
inline TermPtr var(std::string n, Type t) { return mk({Term::Kind::Var, std::move(n), std::move(t), 0, {}}); }
inline TermPtr star() { return mk({}); }
inline TermPtr app(std::string f, TermPtr t) { return mk({Term::Kind::App, std::move(f), {}, 0, {std::move(t)}}); }
inline TermPtr tuple(std::vector<TermPtr> ts) { return mk({Term::Kind::Tuple, "", {}, 0, std::move(ts)}); }
inline TermPtr proj(std::size_t i, TermPtr t) { return mk({Term::Kind::Proj, "", {}, i, {std::move(t)}}); }
inline TermPtr compr(std::string x, Type t, TermPtr body) {
  return mk({Term::Kind::Compr, std::move(x), std::move(t), 0, {std::move(body)}});
}
inline TermPtr eq(TermPtr a, TermPtr b) { return mk({Term::Kind::Eq, "", {}, 0, {std::move(a), std::move(b)}}); }
inline TermPtr in(TermPtr a, TermPtr b) { return mk({Term::Kind::In, "", {}, 0, {std::move(a), std::move(b)}}); }
inline TermPtr truth() { return mk({Term::Kind::True, "", {}, 0, {}}); }
inline TermPtr falsity() { return mk({Term::Kind::False, "", {}, 0, {}}); }
inline TermPtr lnot(TermPtr a) { return mk({Term::Kind::Not, "", {}, 0, {std::move(a)}}); }
inline TermPtr land(TermPtr a, TermPtr b) { return mk({Term::Kind::And, "", {}, 0, {std::move(a), std::move(b)}}); }
inline TermPtr lor(TermPtr a, TermPtr b) { return mk({Term::Kind::Or, "", {}, 0, {std::move(a), std::move(b)}}); }
inline TermPtr limp(TermPtr a, TermPtr b) { return mk({Term::Kind::Implies, "", {}, 0, {std::move(a), std::move(b)}}); }
inline TermPtr liff(TermPtr a, TermPtr b) { return mk({Term::Kind::Iff, "", {}, 0, {std::move(a), std::move(b)}}); }
inline TermPtr forall(std::string x, Type t, TermPtr body) {
  return mk({Term::Kind::Forall, std::move(x), std::move(t), 0, {std::move(body)}});
}
inline TermPtr exists(std::string x, Type t, TermPtr body) {
  return mk({Term::Kind::Exists, std::move(x), std::move(t), 0, {std::move(body)}});
}

/// Structural equality (bound names must match; see alpha_equal).
inline bool equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->name != b->name || a->index != b->index || a->args.size() != b->args.size()) return false;
  if ((a->kind == Term::Kind::Var || is_binder(a->kind)) && !(a->type == b->type)) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i)
    if (!equal(a->args[i], b->args[i])) return false;
  return true;
}

namespace detail {
inline int prec(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Iff: return 1;
    case Term::Kind::Implies: return 2;
    case Term::Kind::Or: return 3;
    case Term::Kind::And: return 4;
    case Term::Kind::Not: return 5;
    case Term::Kind::Eq:
    case Term::Kind::In: return 6;
    case Term::Kind::Forall:
    case Term::Kind::Exists: return 0;
    default: return 7;
  }
}
}  // namespace detail

/// Concrete syntax, re-readable by parse_ls.
inline std::string to_string(const TermPtr& t) {
  using K = Term::Kind;
  auto wrap = [](const TermPtr& s, int min) {
    auto text = to_string(s);
    return detail::prec(*s) < min ? "(" + text + ")" : text;
  };
  switch (t->kind) {
    case K::Var: return t->name;
    case K::Star: return "*";
    case K::True: return "true";
    case K::False: return "false";
    case K::App: return t->name + "(" + to_string(t->args[0]) + ")";
    case K::Proj: return "proj_" + std::to_string(t->index) + "(" + to_string(t->args[0]) + ")";
    case K::Tuple: {
      std::vector<std::string> parts;
      for (const auto& a : t->args) parts.push_back(to_string(a));
      return "<" + join(parts, ", ") + ">";
    }
    case K::Compr: return "{" + t->name + " : " + to_string(t->type) + " | " + to_string(t->args[0]) + "}";
    case K::Forall:
    case K::Exists:
      return std::string(t->kind == K::Forall ? "forall " : "exists ") + t->name + " : " + to_string(t->type) + ". " +
             to_string(t->args[0]);
    case K::Eq: return wrap(t->args[0], 7) + " = " + wrap(t->args[1], 7);
    case K::In: return wrap(t->args[0], 7) + " in " + wrap(t->args[1], 7);
    case K::Not: return "~" + wrap(t->args[0], 5);
    case K::And: return wrap(t->args[0], 4) + " & " + wrap(t->args[1], 5);
    case K::Or: return wrap(t->args[0], 3) + " | " + wrap(t->args[1], 4);
    case K::Implies: return wrap(t->args[0], 3) + " -> " + wrap(t->args[1], 2);
    case K::Iff: return wrap(t->args[0], 2) + " <-> " + wrap(t->args[1], 2);
  }
  return "?";
}

// --- variables, substitution, alpha-equivalence ---------------------------------------

using VarContext = std::map<std::string, Type>;

namespace detail {
inline void collect_free(const TermPtr& t, std::set<std::string>& bound, VarContext& out) {
  if (t->kind == Term::Kind::Var) {
    if (bound.count(t->name)) return;
    auto [it, fresh] = out.emplace(t->name, t->type);
    if (!fresh && !(it->second == t->type))
      throw TypeError("variable `" + t->name + "` used at two types", t->name);
    return;
  }
  if (is_binder(t->kind)) {
    const bool added = bound.insert(t->name).second;
    collect_free(t->args[0], bound, out);
    if (added) bound.erase(t->name);
    return;
  }
  for (const auto& a : t->args) collect_free(a, bound, out);
}

inline void collect_names(const TermPtr& t, std::set<std::string>& out) {
  if (t->kind == Term::Kind::Var || is_binder(t->kind)) out.insert(t->name);
  for (const auto& a : t->args) collect_names(a, out);
}

inline std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string n = base;
  while (avoid.count(n)) n += "'";
  return n;
}
}  // namespace detail

/// Free variables with their annotated types.
inline VarContext free_vars(const TermPtr& t) {
  VarContext out;
  std::set<std::string> bound;
  detail::collect_free(t, bound, out);
  return out;
}

inline std::set<std::string> all_names(const TermPtr& t) {
  std::set<std::string> out;
  detail::collect_names(t, out);
  return out;
}

inline std::string fresh_var(const std::string& base, std::initializer_list<TermPtr> avoid) {
  std::set<std::string> names;
  for (const auto& t : avoid) detail::collect_names(t, names);
  return detail::fresh_name(base, names);
}

namespace detail {
inline TermPtr subst(const TermPtr& t, const std::string& x, const TermPtr& r, const std::set<std::string>& r_free) {
  if (t->kind == Term::Kind::Var) return t->name == x ? r : t;
  if (is_binder(t->kind)) {
    if (t->name == x) return t;
    const auto body_free = free_vars(t->args[0]);
    if (!body_free.count(x)) return t;
    Term c = *t;
    if (r_free.count(t->name)) {
      // rename the binder away from everything in sight
      std::set<std::string> avoid = r_free;
      collect_names(t->args[0], avoid);
      avoid.insert(x);
      const auto y = fresh_name(t->name, avoid);
      c.args[0] = subst(t->args[0], t->name, var(y, t->type), {y});
      c.name = y;
    }
    c.args[0] = subst(c.args[0], x, r, r_free);
    return mk(std::move(c));
  }
  if (t->args.empty()) return t;
  Term c = *t;
  for (auto& a : c.args) a = subst(a, x, r, r_free);
  return mk(std::move(c));
}
}  // namespace detail

/// α-equivalence: equal up to renaming of bound variables.
inline bool alpha_equal(const TermPtr& a, const TermPtr& b) {
  struct Walk {
    std::vector<std::pair<std::string, std::string>> binders;
    bool go(const TermPtr& s, const TermPtr& t) {
      if (s->kind != t->kind || s->index != t->index || s->args.size() != t->args.size()) return false;
      if (s->kind == Term::Kind::Var) {
        if (!(s->type == t->type)) return false;
        for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
          const bool l = it->first == s->name, r = it->second == t->name;
          if (l || r) return l && r;
        }
        return s->name == t->name;
      }
      if (s->kind == Term::Kind::App && s->name != t->name) return false;
      if (is_binder(s->kind)) {
        if (!(s->type == t->type)) return false;
        binders.emplace_back(s->name, t->name);
        const bool ok = go(s->args[0], t->args[0]);
        binders.pop_back();
        return ok;
      }
      for (std::size_t i = 0; i < s->args.size(); ++i)
        if (!go(s->args[i], t->args[i])) return false;
      return true;
    }
  };
  return Walk{}.go(a, b);
}

// --- type inference ---------------------------------------------------------------------

/// The type of `t`, with free variables checked against `ctx`. Throws
/// TypeError naming the offending subterm.
inline Type infer_type(const TermPtr& t, const Signature& sig, const VarContext& ctx) {
  using K = Term::Kind;
  auto fail = [&](const std::string& m) -> Type { throw TypeError(m, to_string(t)); };
  switch (t->kind) {
    case K::Var: {
      auto it = ctx.find(t->name);
      if (it == ctx.end()) return fail("unbound variable `" + t->name + "`");
      if (!(it->second == t->type))
        return fail("variable `" + t->name + "` annotated " + to_string(t->type) + " but bound at " + to_string(it->second));
      return t->type;
    }
    case K::Star: return Type::unit();
    case K::App: {
      auto it = sig.symbols.find(t->name);
      if (it == sig.symbols.end()) return fail("unknown function symbol `" + t->name + "`");
      const auto arg = infer_type(t->args[0], sig, ctx);
      if (!(arg == it->second.dom))
        return fail("`" + t->name + "` expects " + to_string(it->second.dom) + ", got " + to_string(arg));
      return it->second.cod;
    }
    case K::Tuple: {
      std::vector<Type> ts;
      for (const auto& a : t->args) ts.push_back(infer_type(a, sig, ctx));
      return Type::product(std::move(ts));
    }
    case K::Proj: {
      const auto p = infer_type(t->args[0], sig, ctx);
      if (p.kind != Type::Kind::Product) return fail("projection from non-product type " + to_string(p));
      if (t->index < 1 || t->index > p.args.size())
        return fail("projection index " + std::to_string(t->index) + " out of range 1.." + std::to_string(p.args.size()));
      return p.args[t->index - 1];
    }
    case K::Compr:
    case K::Forall:
    case K::Exists: {
      VarContext inner = ctx;
      inner[t->name] = t->type;
      const auto b = infer_type(t->args[0], sig, inner);
      if (!(b == Type::omega())) return fail("body has type " + to_string(b) + ", expected Omega");
      return t->kind == K::Compr ? Type::power(t->type) : Type::omega();
    }
    case K::Eq: {
      const auto a = infer_type(t->args[0], sig, ctx), b = infer_type(t->args[1], sig, ctx);
      if (!(a == b)) return fail("equation between " + to_string(a) + " and " + to_string(b));
      return Type::omega();
    }
    case K::In: {
      const auto a = infer_type(t->args[0], sig, ctx), b = infer_type(t->args[1], sig, ctx);
      if (!(b == Type::power(a))) return fail("membership needs P(" + to_string(a) + "), got " + to_string(b));
      return Type::omega();
    }
    case K::True:
    case K::False: return Type::omega();
    default: {
      for (const auto& a : t->args)
        if (!(infer_type(a, sig, ctx) == Type::omega())) return fail("connective operand is not a formula");
      return Type::omega();
    }
  }
  return fail("unknown term");
}

/// Type of a term whose free variables are taken at their annotations.
inline Type type_of(const TermPtr& t, const Signature& sig) { return infer_type(t, sig, free_vars(t)); }

/// Capture-avoiding substitution of `replacement` for the free occurrences of x.
inline TermPtr substitute(const TermPtr& t, const std::string& x, const Type& x_type, const TermPtr& replacement,
                          const Signature& sig) {
  const auto rt = type_of(replacement, sig);
  if (!(rt == x_type))
    throw TypeError("substituting " + to_string(rt) + " for variable of type " + to_string(x_type), to_string(replacement));
  std::set<std::string> r_free;
  for (const auto& [n, _] : free_vars(replacement)) r_free.insert(n);
  return detail::subst(t, x, replacement, r_free);
}

// --- derived connectives -----------------------------------------------------------------

/// Rewrites the surface connectives into =, ∈ and comprehension:
///   true := * = *             α ∧ β := <α,β> = <true,true>
///   α ⇒ β := (α ∧ β) = α       ∀x.α := {x | α} = {x | true}
///   false := ∀ω.ω              ¬α := α ⇒ false
///   α ∨ β := ∀ω.((α⇒ω) ∧ (β⇒ω)) ⇒ ω
///   ∃x.α := ∀ω.(∀x.(α⇒ω)) ⇒ ω  α ⇔ β := α = β
inline TermPtr desugar(const TermPtr& t) {
  using K = Term::Kind;
  if (t->kind == K::Var || t->kind == K::Star) return t;
  std::vector<TermPtr> a;
  for (const auto& s : t->args) a.push_back(desugar(s));
  auto core_true = [] { return eq(star(), star()); };
  auto core_and = [&](TermPtr x, TermPtr y) { return eq(tuple({x, y}), tuple({core_true(), core_true()})); };
  auto core_imp = [&](TermPtr x, TermPtr y) { return eq(core_and(x, y), x); };
  auto core_all = [&](const std::string& x, const Type& ty, TermPtr b) {
    return eq(compr(x, ty, b), compr(x, ty, core_true()));
  };
  auto fresh_w = [&](std::initializer_list<TermPtr> ts) { return var(fresh_var("w", ts), Type::omega()); };
  switch (t->kind) {
    case K::True: return core_true();
    case K::False: {
      auto w = var("w", Type::omega());
      return core_all("w", Type::omega(), w);
    }
    case K::And: return core_and(a[0], a[1]);
    case K::Implies: return core_imp(a[0], a[1]);
    case K::Iff: return eq(a[0], a[1]);
    case K::Not: return core_imp(a[0], desugar(falsity()));
    case K::Forall: return core_all(t->name, t->type, a[0]);
    case K::Or: {
      auto w = fresh_w({a[0], a[1]});
      return core_all(w->name, Type::omega(), core_imp(core_and(core_imp(a[0], w), core_imp(a[1], w)), w));
    }
    case K::Exists: {
      auto w = fresh_w({a[0], var(t->name, t->type)});
      return core_all(w->name, Type::omega(), core_imp(core_all(t->name, t->type, core_imp(a[0], w)), w));
    }
    default: {
      Term c = *t;
      c.args = std::move(a);
      return mk(std::move(c));
    }
  }
}

// --- parser --------------------------------------------------------------------------------

namespace detail {

class LsParser {
 public:
  LsParser(std::string_view text, const Signature* sig, VarContext ctx) : s_(text), sig_(sig), ctx_(std::move(ctx)) {}

  TermPtr term() {
    auto t = iff();
    skip();
    if (i_ != s_.size()) error("unexpected `" + std::string(1, s_[i_]) + "`");
    return t;
  }

  std::pair<std::vector<TermPtr>, TermPtr> sequent() {
    std::vector<TermPtr> gamma;
    if (!eat(":")) {
      do gamma.push_back(iff());
      while (eat(","));
      expect(":");
    }
    return {std::move(gamma), term()};
  }

  Type type_only() {
    auto t = type();
    skip();
    if (i_ != s_.size()) error("unexpected `" + std::string(1, s_[i_]) + "` in type");
    return t;
  }

 private:
  [[noreturn]] void error(const std::string& m) const { throw ParseError(m, i_); }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(std::string_view tok) {
    skip();
    if (s_.substr(i_, tok.size()) != tok) return false;
    // keep "->" from matching "-" prefixes and keywords from matching identifier prefixes
    if (std::isalpha(static_cast<unsigned char>(tok.back())) && i_ + tok.size() < s_.size() && ident_char(s_[i_ + tok.size()]))
      return false;
    i_ += tok.size();
    return true;
  }
  void expect(std::string_view tok) {
    if (!eat(tok)) error("expected `" + std::string(tok) + "`");
  }
  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }
  std::string ident() {
    skip();
    if (i_ >= s_.size() || !ident_start(s_[i_])) error("expected identifier");
    const std::size_t b = i_;
    while (i_ < s_.size() && ident_char(s_[i_])) ++i_;
    return std::string(s_.substr(b, i_ - b));
  }
  std::string peek_ident() {
    skip();
    std::size_t j = i_;
    if (j >= s_.size() || !ident_start(s_[j])) return "";
    while (j < s_.size() && ident_char(s_[j])) ++j;
    return std::string(s_.substr(i_, j - i_));
  }

  // types: prod := atom ('*' atom)* ; atom := 1 | Omega | Sigma | R | P(type) | name | (type)
  Type type() {
    std::vector<Type> ts{type_atom()};
    while (eat("*")) ts.push_back(type_atom());
    return ts.size() == 1 ? ts[0] : Type::product(std::move(ts));
  }
  Type type_atom() {
    if (eat("(")) {
      auto t = type();
      expect(")");
      return t;
    }
    if (eat("1")) return Type::unit();
    const auto n = peek_ident();
    if (n.empty()) error("expected type");
    if (n == "P") {
      ident();
      expect("(");
      auto t = type();
      expect(")");
      return Type::power(t);
    }
    ident();
    if (n == "Omega") return Type::omega();
    if (n == "Sigma") return Type::sigma();
    if (n == "R") return Type::r();
    if (sig_ && !sig_->grounds.count(n)) {
      i_ -= n.size();
      error("unknown ground type `" + n + "`");
    }
    return Type::ground(n);
  }

  TermPtr iff() {
    auto l = implies();
    if (eat("<->")) return liff(l, iff());
    return l;
  }
  TermPtr implies() {
    auto l = disj();
    if (eat("->")) return limp(l, implies());
    return l;
  }
  TermPtr disj() {
    auto l = conj();
    while (eat("|")) l = lor(l, conj());
    return l;
  }
  TermPtr conj() {
    auto l = unary();
    while (eat("&")) l = land(l, unary());
    return l;
  }
  TermPtr unary() {
    if (eat("~")) return lnot(unary());
    const auto n = peek_ident();
    if (n == "forall" || n == "exists") return quantifier();
    auto l = primary();
    skip();
    if (eat("=")) return eq(l, primary());
    if (eat("in")) return in(l, primary());
    return l;
  }
  TermPtr quantifier() {
    const bool all = ident() == "forall";
    auto [x, ty] = binder();
    expect(".");
    auto saved = bind(x, ty);
    auto body = iff();
    unbind(x, saved);
    return all ? forall(x, ty, body) : exists(x, ty, body);
  }
  std::pair<std::string, Type> binder() {
    const auto x = ident();
    if (reserved(x)) error("`" + x + "` cannot be bound");
    expect(":");
    return {x, type()};
  }
  std::optional<Type> bind(const std::string& x, const Type& t) {
    std::optional<Type> old;
    if (auto it = ctx_.find(x); it != ctx_.end()) old = it->second;
    ctx_[x] = t;
    return old;
  }
  void unbind(const std::string& x, const std::optional<Type>& old) {
    if (old) ctx_[x] = *old;
    else ctx_.erase(x);
  }
  static bool reserved(const std::string& n) {
    return n == "in" || n == "true" || n == "false" || n == "forall" || n == "exists";
  }

  TermPtr primary() {
    skip();
    const std::size_t at = i_;
    if (eat("*")) return star();
    if (eat("(")) {
      auto t = iff();
      expect(")");
      return t;
    }
    if (eat("<")) {
      std::vector<TermPtr> ts;
      if (!eat(">")) {
        do ts.push_back(iff());
        while (eat(","));
        expect(">");
      }
      return tuple(std::move(ts));
    }
    if (eat("{")) {
      auto [x, ty] = binder();
      expect("|");
      auto saved = bind(x, ty);
      auto body = iff();
      unbind(x, saved);
      expect("}");
      return compr(x, ty, body);
    }
    const auto n = ident();
    if (n == "true") return truth();
    if (n == "false") return falsity();
    if (n == "in" || n == "forall" || n == "exists") {
      i_ = at;
      error("unexpected keyword `" + n + "`");
    }
    if (n.rfind("proj_", 0) == 0 && n.size() > 5 &&
        std::all_of(n.begin() + 5, n.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      expect("(");
      auto t = iff();
      expect(")");
      return proj(std::stoul(n.substr(5)), t);
    }
    skip();
    if (i_ < s_.size() && s_[i_] == '(') {
      if (sig_ && !sig_->symbols.count(n)) {
        i_ = at;
        error("unknown function symbol `" + n + "`");
      }
      expect("(");
      std::vector<TermPtr> ts{iff()};
      while (eat(",")) ts.push_back(iff());
      expect(")");
      return app(n, ts.size() == 1 ? ts[0] : tuple(std::move(ts)));
    }
    auto it = ctx_.find(n);
    if (it == ctx_.end()) {
      i_ = at;
      error("unknown variable `" + n + "`");
    }
    return var(n, it->second);
  }

  std::string_view s_;
  std::size_t i_ = 0;
  const Signature* sig_;
  VarContext ctx_;
};

}  // namespace detail

/// Parses a term. Free variables must be typed by `ctx`; bound ones carry
/// their binder's type. Application `f(a, b)` abbreviates `f(<a, b>)`.
inline TermPtr parse_ls(std::string_view text, const Signature& sig, const VarContext& ctx = {}) {
  return detail::LsParser(text, &sig, ctx).term();
}

inline Type parse_ls_type(std::string_view text) { return detail::LsParser(text, nullptr, {}).type_only(); }

// --- sequents and axioms --------------------------------------------------------------------

/// Γ : α, with Γ read as a finite set.
struct Sequent {
  std::vector<TermPtr> context;
  TermPtr conclusion;
};

inline std::string to_string(const Sequent& s) {
  std::vector<std::string> parts;
  for (const auto& g : s.context) parts.push_back(to_string(g));
  return join(parts, ", ") + (parts.empty() ? ": " : " : ") + to_string(s.conclusion);
}

/// "Γ : α" with Γ comma-separated; ": α" has an empty context.
inline Sequent parse_sequent(std::string_view text, const Signature& sig, const VarContext& ctx = {}) {
  auto [gamma, alpha] = detail::LsParser(text, &sig, ctx).sequent();
  return Sequent{std::move(gamma), std::move(alpha)};
}

namespace detail {
inline bool contains_alpha(const std::vector<TermPtr>& gamma, const TermPtr& f) {
  return std::any_of(gamma.begin(), gamma.end(), [&](const TermPtr& g) { return alpha_equal(g, f); });
}
inline bool subset_alpha(const std::vector<TermPtr>& a, const std::vector<TermPtr>& b) {
  return std::all_of(a.begin(), a.end(), [&](const TermPtr& x) { return contains_alpha(b, x); });
}
inline bool same_set(const std::vector<TermPtr>& a, const std::vector<TermPtr>& b) {
  return subset_alpha(a, b) && subset_alpha(b, a);
}

/// True if `after` arises from `before` by replacing some free occurrences of
/// the term `x` with `y` (both free at every replaced position).
inline bool replaces(const TermPtr& before, const TermPtr& after, const TermPtr& x, const TermPtr& y,
                     std::set<std::string>& bound) {
  auto clear = [&](const TermPtr& t) {
    for (const auto& [n, _] : free_vars(t))
      if (bound.count(n)) return false;
    return true;
  };
  if (alpha_equal(before, x) && alpha_equal(after, y) && clear(x) && clear(y)) return true;
  if (before->kind != after->kind || before->name != after->name || before->index != after->index ||
      before->args.size() != after->args.size() || !(before->type == after->type))
    return false;
  if (before->kind == Term::Kind::Var) return true;
  const bool binds = is_binder(before->kind) && bound.insert(before->name).second;
  bool ok = true;
  for (std::size_t i = 0; ok && i < before->args.size(); ++i) ok = replaces(before->args[i], after->args[i], x, y, bound);
  if (binds) bound.erase(before->name);
  return ok;
}

inline bool is_iff(const TermPtr& t) { return t->kind == Term::Kind::Iff; }
}  // namespace detail

/// Recognises the basic axiom schemas: Tautology (α : α), Unity (: x = * with
/// x : 1), Equality (x = y, α(z/x) : α(z/y)), Products (: (<t₁..tₙ>)ᵢ = tᵢ and
/// : t = <(t)₁..(t)ₙ>) and Comprehension (: t ∈ {x | α} ⇔ α(t/x)). ⇔ may be
/// written `<->` or as an equation between formulas.
inline std::optional<std::string> is_axiom_instance(const Sequent& s, const Signature& sig) {
  using K = Term::Kind;
  const auto& g = s.context;
  const auto& c = s.conclusion;
  if (g.size() == 1 && alpha_equal(g[0], c)) return "Tautology";
  if (g.empty() && c->kind == K::Eq) {
    const auto& l = c->args[0];
    const auto& r = c->args[1];
    if (l->kind == K::Var && l->type == Type::unit() && r->kind == K::Star) return "Unity";
    if (l->kind == K::Proj && l->args[0]->kind == K::Tuple && l->index >= 1 && l->index <= l->args[0]->args.size() &&
        alpha_equal(l->args[0]->args[l->index - 1], r))
      return "Products";
    if (r->kind == K::Tuple && !r->args.empty()) {
      bool ok = true;
      for (std::size_t i = 0; ok && i < r->args.size(); ++i)
        ok = r->args[i]->kind == K::Proj && r->args[i]->index == i + 1 && alpha_equal(r->args[i]->args[0], l);
      try {
        const auto lt = type_of(l, sig);
        ok = ok && lt.kind == Type::Kind::Product && lt.args.size() == r->args.size();
      } catch (const Error&) {
        ok = false;
      }
      if (ok) return "Products";
    }
  }
  if (g.empty() && (c->kind == K::Iff || c->kind == K::Eq)) {
    for (int side = 0; side < 2; ++side) {
      const auto& mem = c->args[side];
      const auto& rhs = c->args[1 - side];
      if (mem->kind != K::In || mem->args[1]->kind != K::Compr) continue;
      const auto& cp = mem->args[1];
      try {
        if (alpha_equal(substitute(cp->args[0], cp->name, cp->type, mem->args[0], sig), rhs)) return "Comprehension";
      } catch (const Error&) {
      }
    }
  }
  if (g.size() == 2) {
    for (int k = 0; k < 2; ++k) {
      const auto& e = g[k];
      const auto& before = g[1 - k];
      if (e->kind != K::Eq) continue;
      if (e->args[0]->kind != K::Var || e->args[1]->kind != K::Var) continue;
      std::set<std::string> bound;
      if (detail::replaces(before, c, e->args[0], e->args[1], bound)) return "Equality";
    }
  }
  return std::nullopt;
}

// --- derivations -------------------------------------------------------------------------------

/// One line of a derivation. Rules: "axiom"; "thinning" (from); "cut"
/// (from = Γ : α, from2 = Δ, α : β gives Γ ∪ Δ : β); "subst" (from, with the
/// closed term `term` for variable `var` of type `var_type`); "iff" (from =
/// Γ : α, from2 = Δ : α ⇔ β gives Γ ∪ Δ : β). Line numbers are 1-based.
struct DerivationLine {
  Sequent sequent;
  std::string rule;
  std::size_t from = 0, from2 = 0;
  std::string var = {};
  Type var_type = {};
  TermPtr term = nullptr;
};

struct DerivationVerdict {
  bool accepted = false;
  std::size_t line = 0;  // first rejected line
  std::string message;
  std::vector<std::string> justifications;
};

inline DerivationVerdict check_ls_derivation(const std::vector<DerivationLine>& lines, const Signature& sig) {
  DerivationVerdict v;
  auto reject = [&](std::size_t i, const std::string& m) {
    v.accepted = false;
    v.line = i + 1;
    v.message = m;
    return v;
  };
  if (lines.empty()) return reject(0, "empty derivation");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& L = lines[i];
    const auto& s = L.sequent;
    try {
      for (const auto& f : s.context)
        if (!(type_of(f, sig) == Type::omega())) return reject(i, "context member is not a formula");
      if (!(type_of(s.conclusion, sig) == Type::omega())) return reject(i, "conclusion is not a formula");
    } catch (const Error& e) {
      return reject(i, e.what());
    }
    auto cite = [&](std::size_t n) -> const Sequent* {
      if (n == 0 || n > i) return nullptr;
      return &lines[n - 1].sequent;
    };
    if (L.rule == "axiom") {
      auto name = is_axiom_instance(s, sig);
      if (!name) return reject(i, "not an instance of a basic axiom");
      v.justifications.push_back(*name);
    } else if (L.rule == "thinning") {
      const auto* p = cite(L.from);
      if (!p) return reject(i, "thinning cites a missing or later line");
      if (!alpha_equal(p->conclusion, s.conclusion) || !detail::subset_alpha(p->context, s.context))
        return reject(i, "thinning must keep the conclusion and enlarge the context");
      v.justifications.push_back("thinning");
    } else if (L.rule == "cut") {
      const auto *p = cite(L.from), *q = cite(L.from2);
      if (!p || !q) return reject(i, "cut cites a missing or later line");
      if (!detail::contains_alpha(q->context, p->conclusion)) return reject(i, "cut formula does not occur in the second premise");
      if (!alpha_equal(q->conclusion, s.conclusion)) return reject(i, "cut conclusion differs from the second premise");
      std::vector<TermPtr> expected = p->context;
      for (const auto& f : q->context)
        if (!alpha_equal(f, p->conclusion)) expected.push_back(f);
      if (!detail::same_set(expected, s.context)) return reject(i, "cut context must be the union of the premises' contexts");
      v.justifications.push_back("cut");
    } else if (L.rule == "subst") {
      const auto* p = cite(L.from);
      if (!p) return reject(i, "substitution cites a missing or later line");
      if (!L.term || !free_vars(L.term).empty()) return reject(i, "substitution needs a closed term");
      try {
        Sequent expected;
        for (const auto& f : p->context) expected.context.push_back(substitute(f, L.var, L.var_type, L.term, sig));
        expected.conclusion = substitute(p->conclusion, L.var, L.var_type, L.term, sig);
        if (!alpha_equal(expected.conclusion, s.conclusion) || !detail::same_set(expected.context, s.context))
          return reject(i, "sequent is not the cited substitution instance");
      } catch (const Error& e) {
        return reject(i, e.what());
      }
      v.justifications.push_back("subst");
    } else if (L.rule == "iff") {
      const auto *p = cite(L.from), *q = cite(L.from2);
      if (!p || !q) return reject(i, "bi-implication rewrite cites a missing or later line");
      const auto& bi = q->conclusion;
      if (!(bi->kind == Term::Kind::Iff || (bi->kind == Term::Kind::Eq && type_of(bi->args[0], sig) == Type::omega())))
        return reject(i, "second premise is not a bi-implication");
      if (!alpha_equal(bi->args[0], p->conclusion) || !alpha_equal(bi->args[1], s.conclusion))
        return reject(i, "bi-implication does not rewrite the cited conclusion into this one");
      std::vector<TermPtr> expected = p->context;
      expected.insert(expected.end(), q->context.begin(), q->context.end());
      if (!detail::same_set(expected, s.context)) return reject(i, "context must be the union of the premises' contexts");
      v.justifications.push_back("iff");
    } else {
      return reject(i, "unknown rule `" + L.rule + "`");
    }
  }
  v.accepted = true;
  return v;
}

// --- axiom packs and L-set operations ---------------------------------------------------------

struct NamedSequent {
  std::string name;
  Sequent sequent;
};

/// Sequents together with the symbols they need. Free variables in a sequent
/// are read universally.
struct AxiomPack {
  std::string name;
  std::map<std::string, Symbol> symbols;
  std::vector<NamedSequent> axioms;

  /// Adds the pack's symbols to `sig` (an existing symbol must agree).
  void extend(Signature& sig) const {
    for (const auto& [n, s] : symbols) {
      auto it = sig.symbols.find(n);
      if (it == sig.symbols.end()) sig.symbols.emplace(n, s);
      else if (!(it->second.dom == s.dom && it->second.cod == s.cod))
        throw InvalidStructureError("pack `" + name + "` needs `" + n + "` at a different type");
    }
  }
};

/// Abelian group on R: zero : 1 -> R, plus : R * R -> R, minus : R -> R.
inline AxiomPack abelian_axiom_pack() {
  AxiomPack p;
  p.name = "abelian";
  p.symbols["zero"] = {Type::unit(), Type::r()};
  p.symbols["plus"] = {Type::product({Type::r(), Type::r()}), Type::r()};
  p.symbols["minus"] = {Type::r(), Type::r()};
  Signature sig;
  sig.symbols = p.symbols;
  const VarContext ctx{{"r", Type::r()}, {"s", Type::r()}, {"t", Type::r()}};
  auto ax = [&](const std::string& n, const std::string& text) { p.axioms.push_back({n, parse_sequent(text, sig, ctx)}); };
  ax("unit", ": plus(r, zero(*)) = r");
  ax("associativity", ": plus(plus(r, s), t) = plus(r, plus(s, t))");
  ax("commutativity", ": plus(r, s) = plus(s, r)");
  ax("inverse", ": plus(r, minus(r)) = zero(*)");
  return p;
}

/// X ∩ Y := {x | x ∈ X ∧ x ∈ Y} for closed X, Y of the same power type.
inline TermPtr lset_intersection(const TermPtr& X, const TermPtr& Y, const Signature& sig) {
  const auto tx = infer_type(X, sig, {}), ty = infer_type(Y, sig, {});
  if (tx.kind != Type::Kind::Power) throw TypeError("intersection of a non-power type " + to_string(tx), to_string(X));
  if (!(tx == ty)) throw TypeError("intersection of " + to_string(tx) + " and " + to_string(ty), to_string(Y));
  const auto x = var(fresh_var("x", {X, Y}), tx.args[0]);
  return compr(x->name, x->type, land(in(x, X), in(x, Y)));
}

}  // namespace toposlang::ls
