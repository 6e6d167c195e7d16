#pragma once
// Representations of L(S) in a presheaf topos: types become presheaves,
// function symbols natural transformations, terms arrows out of the product
// of their context. The classical case uses the one-object base.

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "toposlang/ls.hpp"
#include "toposlang/pl.hpp"
#include "toposlang/topos.hpp"

namespace toposlang::rep {

using cat::MorId;
using cat::ObjId;
using topos::Elem;
using topos::GlobalElement;
using topos::NatTransform;
using topos::Presheaf;
using ls::Type;
using ls::TermPtr;
using topos::ExponentialObject;
using topos::ProductObject;
using topos::Topos;

/// An ordered typed context; its interpretation is the product of the types.
using Context = std::vector<std::pair<std::string, Type>>;

inline Context context_of(const ls::VarContext& vars) { return {vars.begin(), vars.end()}; }

/// A representation φ: grounds and symbols assigned in a presheaf topos,
/// plus the axioms it is meant to satisfy. Interpreted types are cached.
class ToposRep {
 public:
  ToposRep(std::shared_ptr<const Topos> topos, ls::Signature sig, std::map<std::string, Presheaf> grounds,
           std::map<std::string, NatTransform> symbols, std::vector<ls::NamedSequent> axioms = {})
      : topos_(std::move(topos)),
        sig_(std::move(sig)),
        grounds_(std::move(grounds)),
        symbols_(std::move(symbols)),
        axioms_(std::move(axioms)),
        cache_(std::make_shared<Cache>()) {}

  const Topos& topos() const { return *topos_; }
  const std::shared_ptr<const Topos>& topos_ptr() const { return topos_; }
  const ls::Signature& signature() const { return sig_; }
  const std::map<std::string, Presheaf>& grounds() const { return grounds_; }
  const std::map<std::string, NatTransform>& symbols() const { return symbols_; }
  const std::vector<ls::NamedSequent>& axioms() const { return axioms_; }

  const NatTransform& symbol(const std::string& f) const {
    auto it = symbols_.find(f);
    if (it == symbols_.end()) throw UnknownElementError("symbol `" + f + "` has no assigned arrow");
    return it->second;
  }

  /// ⟦T⟧: 1 ↦ terminal, Ω ↦ Ω, grounds as assigned, products and power
  /// objects structurally.
  const Presheaf& type(const Type& t) const {
    switch (t.kind) {
      case Type::Kind::Unit: return topos_->terminal();
      case Type::Kind::Omega: return topos_->omega();
      case Type::Kind::Sigma: return ground("Sigma");
      case Type::Kind::R: return ground("R");
      case Type::Kind::Ground: return ground(t.name);
      case Type::Kind::Product: return product(t).object;
      case Type::Kind::Power: return power(t.args[0]).object;
    }
    throw InvalidStructureError("unknown type");
  }

  /// The product object for a Product type.
  const ProductObject& product(const Type& t) const {
    if (auto it = cache_->products.find(t); it != cache_->products.end()) return it->second;
    std::vector<Presheaf> fs;
    for (const auto& a : t.args) fs.push_back(type(a));
    return cache_->products.emplace(t, topos_->product(std::move(fs))).first->second;
  }

  /// P⟦T⟧.
  const ExponentialObject& power(const Type& t) const {
    if (auto it = cache_->powers.find(t); it != cache_->powers.end()) return it->second;
    auto X = type(t);
    return cache_->powers.emplace(t, topos_->power_object(X)).first->second;
  }

  /// The product of a context's types (the terminal object when empty).
  const ProductObject& context(const Context& ctx) const {
    std::vector<Type> ts;
    for (const auto& [_, t] : ctx) ts.push_back(t);
    if (auto it = cache_->contexts.find(ts); it != cache_->contexts.end()) return it->second;
    std::vector<Presheaf> fs;
    for (const auto& t : ts) fs.push_back(type(t));
    return cache_->contexts.emplace(ts, topos_->product(std::move(fs))).first->second;
  }

 private:
  const Presheaf& ground(const std::string& g) const {
    auto it = grounds_.find(g);
    if (it == grounds_.end()) throw UnknownElementError("ground type `" + g + "` is not assigned");
    return it->second;
  }

  struct Cache {
    std::map<Type, ProductObject> products;
    std::map<Type, ExponentialObject> powers;
    std::map<std::vector<Type>, ProductObject> contexts;
  };
  std::shared_ptr<const Topos> topos_;
  ls::Signature sig_;
  std::map<std::string, Presheaf> grounds_;
  std::map<std::string, NatTransform> symbols_;
  std::vector<ls::NamedSequent> axioms_;
  std::shared_ptr<Cache> cache_;
};

inline const Presheaf& interpret_type(const Type& t, const ToposRep& r) { return r.type(t); }

// --- term evaluation ---------------------------------------------------------------

namespace detail {

/// A term annotated with its type and the objects evaluation needs.
struct Node {
  const ls::Term* term;
  Type type;
  const Presheaf* object = nullptr;         // ⟦type⟧ (for Eq operands, binders' variable)
  const ProductObject* product = nullptr;   // Tuple / Proj
  const ExponentialObject* power = nullptr; // In (power of the element type), Compr (result)
  const NatTransform* symbol = nullptr;     // App
  std::vector<Node> kids;
};

class Evaluator {
 public:
  explicit Evaluator(const ToposRep& r) : R(r), T(r.topos()), C(r.topos().base()) {}

  Node annotate(const TermPtr& t, ls::VarContext& ctx) {
    using K = ls::Term::Kind;
    Node n{t.get(), ls::infer_type(t, R.signature(), ctx), nullptr, nullptr, nullptr, nullptr, {}};
    if (ls::is_binder(t->kind)) {
      auto saved = ctx.find(t->name) == ctx.end() ? std::optional<Type>{} : std::optional<Type>{ctx[t->name]};
      ctx[t->name] = t->type;
      n.kids.push_back(annotate(t->args[0], ctx));
      if (saved) ctx[t->name] = *saved;
      else ctx.erase(t->name);
      n.object = &R.type(t->type);
      if (t->kind == K::Compr) n.power = &R.power(t->type);
      return n;
    }
    for (const auto& a : t->args) n.kids.push_back(annotate(a, ctx));
    switch (t->kind) {
      case K::Var: n.object = &R.type(n.type); break;
      case K::App: n.symbol = &R.symbol(t->name); break;
      case K::Tuple: n.product = n.type.kind == Type::Kind::Product ? &R.product(n.type) : nullptr; break;
      case K::Proj: n.product = &R.product(n.kids[0].type); break;
      case K::Eq: n.object = &R.type(n.kids[0].type); break;
      case K::In: n.power = &R.power(n.kids[0].type); break;
      default: break;
    }
    return n;
  }

  struct Binding {
    std::string name;
    const Presheaf* object;
    Elem value;
  };
  using Env = std::vector<Binding>;

  Env restrict(const Env& env, MorId h) const {
    Env out = env;
    for (auto& b : out) b.value = b.object->restrict(h, b.value);
    return out;
  }

  Elem sieve_of(ObjId a, const Bitset& members) const { return T.sieve_index(cat::Sieve{a, members}); }

  /// The value of `n` at stage a under `env` (all values at stage a).
  Elem eval(const Node& n, ObjId a, Env& env) {
    using K = ls::Term::Kind;
    const auto& t = *n.term;
    switch (t.kind) {
      case K::Var:
        for (auto it = env.rbegin(); it != env.rend(); ++it)
          if (it->name == t.name) return it->value;
        throw UnknownElementError("variable `" + t.name + "` has no value");
      case K::Star: return 0;
      case K::App: return n.symbol->at(a, eval(n.kids[0], a, env));
      case K::Tuple: {
        if (!n.product) return 0;  // the empty tuple is *
        std::vector<Elem> xs;
        for (const auto& k : n.kids) xs.push_back(eval(k, a, env));
        return n.product->encode(a, xs);
      }
      case K::Proj: return n.product->decode(a, eval(n.kids[0], a, env)).at(t.index - 1);
      case K::Eq: {
        const Elem x = eval(n.kids[0], a, env), y = eval(n.kids[1], a, env);
        Bitset s(C.num_morphisms());
        for (MorId h : C.into(a))
          if (n.object->restrict(h, x) == n.object->restrict(h, y)) s.set(h);
        return sieve_of(a, s);
      }
      case K::In: {
        const Elem x = eval(n.kids[0], a, env), theta = eval(n.kids[1], a, env);
        return n.power->apply(a, theta, C.identity(a), x);
      }
      case K::Compr: {
        // power transpose: θ_c(h, y) = ⟦body⟧_c(env·h, y)
        const auto& E = *n.power;
        const auto& dom = E.domains[a];
        std::vector<Elem> flat(E.offsets[a].back());
        for (ObjId c = 0; c < C.num_objects(); ++c)
          for (Elem i = 0; i < dom.object.size(c); ++i) {
            auto hy = dom.decode(c, i);
            const MorId h = C.hom(c, a).at(hy[0]);
            Env inner = restrict(env, h);
            inner.push_back({t.name, n.object, hy[1]});
            flat[E.offsets[a][c] + i] = eval(n.kids[0], c, inner);
          }
        return E.index[a].at(flat);
      }
      case K::True: return T.top(a);
      case K::False: return T.bottom(a);
      case K::Not: return T.omega_implies(a, eval(n.kids[0], a, env), T.bottom(a));
      case K::And: return T.omega_meet(a, eval(n.kids[0], a, env), eval(n.kids[1], a, env));
      case K::Or: return T.omega_join(a, eval(n.kids[0], a, env), eval(n.kids[1], a, env));
      case K::Implies: return T.omega_implies(a, eval(n.kids[0], a, env), eval(n.kids[1], a, env));
      case K::Iff: {
        const Elem x = eval(n.kids[0], a, env), y = eval(n.kids[1], a, env);
        return T.omega_meet(a, T.omega_implies(a, x, y), T.omega_implies(a, y, x));
      }
      case K::Forall: {
        // h ∈ S iff the body holds for every element at every stage below h
        std::map<MorId, bool> good;
        for (MorId k : C.into(a)) {
          const ObjId d = C.dom(k);
          Env inner = restrict(env, k);
          bool all = true;
          for (Elem y = 0; all && y < n.object->size(d); ++y) {
            inner.push_back({t.name, n.object, y});
            all = eval(n.kids[0], d, inner) == T.top(d);
            inner.pop_back();
          }
          good[k] = all;
        }
        Bitset s(C.num_morphisms());
        for (MorId h : C.into(a)) {
          bool all = true;
          for (MorId g : C.into(C.dom(h))) all = all && good.at(C.compose(h, g));
          if (all) s.set(h);
        }
        return sieve_of(a, s);
      }
      case K::Exists: {
        Bitset s(C.num_morphisms());
        for (MorId h : C.into(a)) {
          const ObjId c = C.dom(h);
          Env inner = restrict(env, h);
          for (Elem y = 0; y < n.object->size(c); ++y) {
            inner.push_back({t.name, n.object, y});
            const bool holds = eval(n.kids[0], c, inner) == T.top(c);
            inner.pop_back();
            if (holds) {
              s.set(h);
              break;
            }
          }
        }
        return sieve_of(a, s);
      }
    }
    throw InvalidStructureError("unknown term");
  }

  const ToposRep& R;
  const Topos& T;
  const cat::FiniteCategory& C;
};

}  // namespace detail

/// ⟦t⟧: ⟦ctx⟧ → ⟦type of t⟧, compositionally; the context must type every
/// free variable of t. Closed formulas give arrows 1 → Ω.
inline NatTransform interpret_term(const TermPtr& t, const Context& ctx, const ToposRep& r) {
  ls::VarContext vars;
  for (const auto& [n, ty] : ctx)
    if (!vars.emplace(n, ty).second) throw InvalidStructureError("context binds `" + n + "` twice");
  detail::Evaluator ev(r);
  const auto root = ev.annotate(t, vars);
  const auto& P = r.context(ctx);
  const auto& C = r.topos().base();
  std::vector<std::vector<Elem>> comps(C.num_objects());
  for (ObjId a = 0; a < C.num_objects(); ++a)
    for (Elem i = 0; i < P.object.size(a); ++i) {
      detail::Evaluator::Env env;
      const auto xs = P.decode(a, i);
      for (std::size_t k = 0; k < ctx.size(); ++k) env.push_back({ctx[k].first, &P.factors[k], xs[k]});
      comps[a].push_back(ev.eval(root, a, env));
    }
  return NatTransform(P.object, r.type(root.type), std::move(comps));
}

/// ⟦t⟧ at one stage and one assignment `xs` of the context (values at
/// stage a), without building the whole context product.
inline Elem interpret_at(const TermPtr& t, const Context& ctx, ObjId a, const std::vector<Elem>& xs, const ToposRep& r) {
  ls::VarContext vars(ctx.begin(), ctx.end());
  detail::Evaluator ev(r);
  const auto root = ev.annotate(t, vars);
  detail::Evaluator::Env env;
  for (std::size_t k = 0; k < ctx.size(); ++k) env.push_back({ctx[k].first, &r.type(ctx[k].second), xs.at(k)});
  return ev.eval(root, a, env);
}

/// The global element named by a closed formula.
inline GlobalElement interpret_sentence(const TermPtr& t, const ToposRep& r) {
  const auto n = interpret_term(t, {}, r);
  GlobalElement g{n.target(), {}};
  for (ObjId a = 0; a < n.components().size(); ++a) g.choice.push_back(n.at(a, 0));
  return g;
}

/// The members at stage a of an element θ of PX: x with id_a ∈ θ_a(id_a, x).
inline Bitset extension(const Topos& T, const ExponentialObject& PX, ObjId a, Elem theta) {
  Bitset out(PX.exponent.size(a));
  for (Elem x = 0; x < PX.exponent.size(a); ++x)
    if (PX.apply(a, theta, T.base().identity(a), x) == T.top(a)) out.set(x);
  return out;
}

/// The explicit composite Σ × PR --A×id--> R × PR --ev--> Ω.
inline NatTransform membership_chain(const std::string& A, const ToposRep& r) {
  const auto& T = r.topos();
  const auto& PR = r.power(Type::r());
  const auto& src = r.context({{"s", Type::sigma()}, {"D", Type::power(Type::r())}});
  const auto mid = T.product({r.type(Type::r()), PR.object});
  const auto a_times_id = T.product_map(src, mid, {r.symbol(A), identity_arrow(PR.object)});
  return compose(T.evaluation(PR, mid), a_times_id);
}

inline Context prop_family_context() { return {{"D", Type::power(Type::r())}, {"s", Type::sigma()}}; }

/// The power transpose PR → PΣ of ⟦A(s) ∈ D⟧ (read over PR × Σ).
inline NatTransform prop_family(const std::string& A, const ToposRep& r) {
  const auto ctx = prop_family_context();
  const auto f = interpret_term(ls::in(ls::app(A, ls::var("s", Type::sigma())), ls::var("D", Type::power(Type::r()))), ctx, r);
  return r.topos().transpose(f, r.context(ctx), r.power(Type::sigma()));
}

// --- axiom validation -------------------------------------------------------------------

struct AxiomFailure {
  std::string axiom;
  std::string sequent;
  std::string stage;
  std::vector<std::pair<std::string, std::string>> witness;  // variable, value label
};

struct AxiomReport {
  std::size_t checks = 0;
  std::vector<AxiomFailure> failures;
  bool ok() const { return failures.empty(); }
};

/// Γ : α holds in r when ⟦∧Γ⟧ ≤ ⟦α⟧ at every stage and every assignment of
/// its free variables (read universally).
inline std::optional<AxiomFailure> check_sequent(const ls::NamedSequent& s, const ToposRep& r, std::size_t* checks = nullptr) {
  ls::VarContext vars;
  auto add = [&](const TermPtr& f) {
    for (const auto& [n, t] : ls::free_vars(f)) {
      auto [it, fresh] = vars.emplace(n, t);
      if (!fresh && !(it->second == t)) throw TypeError("variable `" + n + "` used at two types", ls::to_string(s.sequent));
    }
  };
  for (const auto& g : s.sequent.context) add(g);
  add(s.sequent.conclusion);
  const auto ctx = context_of(vars);
  const auto& T = r.topos();
  std::vector<NatTransform> gamma;
  for (const auto& g : s.sequent.context) gamma.push_back(interpret_term(g, ctx, r));
  const auto alpha = interpret_term(s.sequent.conclusion, ctx, r);
  const auto& P = r.context(ctx);
  for (ObjId a = 0; a < T.base().num_objects(); ++a)
    for (Elem i = 0; i < P.object.size(a); ++i) {
      if (checks) ++*checks;
      Elem lhs = T.top(a);
      for (const auto& g : gamma) lhs = T.omega_meet(a, lhs, g.at(a, i));
      if (T.omega_leq(a, lhs, alpha.at(a, i))) continue;
      AxiomFailure f{s.name, ls::to_string(s.sequent), T.base().object(a), {}};
      const auto xs = P.decode(a, i);
      for (std::size_t k = 0; k < ctx.size(); ++k) f.witness.emplace_back(ctx[k].first, P.factors[k].label(a, xs[k]));
      return f;
    }
  return std::nullopt;
}

inline AxiomReport validate_axioms(const ToposRep& r, const std::vector<ls::NamedSequent>& axioms) {
  AxiomReport rep;
  for (const auto& s : axioms)
    if (auto f = check_sequent(s, r, &rep.checks)) rep.failures.push_back(std::move(*f));
  return rep;
}

inline AxiomReport validate_axioms(const ToposRep& r) { return validate_axioms(r, r.axioms()); }

// --- building ---------------------------------------------------------------------------

/// Checks shapes, naturality, faithfulness and the axioms; throws
/// InvalidStructureError describing the first problem.
inline ToposRep build_rep(std::shared_ptr<const Topos> topos, ls::Signature sig, std::map<std::string, Presheaf> grounds,
                          std::map<std::string, NatTransform> symbols, std::vector<ls::NamedSequent> axioms = {}) {
  sig.validate();
  for (const auto& g : sig.grounds) {
    auto it = grounds.find(g);
    if (it == grounds.end()) throw InvalidStructureError("ground type `" + g + "` is not assigned");
    if (!it->second.same_base(topos->terminal()))
      throw InvalidStructureError("ground type `" + g + "` lives on a different base category");
    if (!validate_presheaf(it->second).ok()) throw InvalidStructureError("ground type `" + g + "` is not a presheaf");
  }
  for (const auto& [g, _] : grounds)
    if (!sig.grounds.count(g)) throw InvalidStructureError("assignment for undeclared ground type `" + g + "`");
  for (const auto& [n, _] : symbols)
    if (!sig.symbols.count(n)) throw InvalidStructureError("arrow for undeclared symbol `" + n + "`");
  ToposRep r(topos, sig, grounds, symbols, axioms);
  for (const auto& [n, s] : sig.symbols) {
    auto it = symbols.find(n);
    if (it == symbols.end()) throw InvalidStructureError("symbol `" + n + "` has no assigned arrow");
    if (!(it->second.source() == r.type(s.dom)) || !(it->second.target() == r.type(s.cod)))
      throw InvalidStructureError("arrow for `" + n + "` does not have shape " + ls::to_string(s.dom) + " -> " +
                                  ls::to_string(s.cod));
    if (!validate_nat(it->second).ok()) throw InvalidStructureError("arrow for `" + n + "` is not natural");
  }
  for (auto i = symbols.begin(); i != symbols.end(); ++i)
    for (auto j = std::next(i); j != symbols.end(); ++j)
      if (i->second == j->second)
        throw InvalidStructureError("not faithful: symbols `" + i->first + "` and `" + j->first + "` have the same arrow");
  auto report = validate_axioms(r);
  if (!report.ok()) {
    const auto& f = report.failures.front();
    std::vector<std::string> w;
    for (const auto& [v, l] : f.witness) w.push_back(v + "=" + l);
    throw InvalidStructureError("axiom `" + f.axiom + "` (" + f.sequent + ") fails at stage " + f.stage + " with " + join(w, ", "));
  }
  return r;
}

// --- the classical representation -------------------------------------------------------

/// A classical system on the one-object base: Σ is the state set, R the
/// finite set of attained quantity values, and each quantity its value table.
/// Interval arguments Δ enter through their trace on the attained values.
struct EffectiveClassicalRep {
  pl::ClassicalSystem system;
  std::vector<Rational> values;
  ToposRep rep;

  /// The element of PR cut out by Δ.
  Elem delta(const pl::IntervalSet& D) const {
    const auto& PR = rep.power(Type::r());
    std::vector<Elem> flat(values.size());
    const auto& T = rep.topos();
    for (std::size_t k = 0; k < values.size(); ++k) flat[k] = D.member(values[k]) ? T.top(0) : T.bottom(0);
    return PR.index[0].at(flat);
  }
  /// State set of an element of PΣ.
  Bitset states_of(Elem theta) const { return extension(rep.topos(), rep.power(Type::sigma()), 0, theta); }
};

inline EffectiveClassicalRep effective_classical_rep(const pl::ClassicalSystem& sys, std::vector<ls::NamedSequent> axioms = {}) {
  sys.validate();
  auto T = std::make_shared<const Topos>(cat::FiniteCategory::point());
  std::vector<Rational> values;
  for (const auto& [_, vs] : sys.quantities) values.insert(values.end(), vs.begin(), vs.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<std::string> labels;
  for (const auto& v : values) labels.push_back(format_rational(v));
  ls::Signature sig;
  std::map<std::string, Presheaf> grounds{{"Sigma", topos::constant_presheaf(T->base_ptr(), sys.states)},
                                          {"R", topos::constant_presheaf(T->base_ptr(), labels)}};
  std::map<std::string, NatTransform> symbols;
  for (const auto& [q, vs] : sys.quantities) {
    sig.symbol(q, Type::sigma(), Type::r());
    std::vector<Elem> table;
    for (const auto& v : vs) table.push_back(std::lower_bound(values.begin(), values.end(), v) - values.begin());
    symbols.emplace(q, NatTransform(grounds["Sigma"], grounds["R"], {table}));
  }
  auto r = build_rep(T, sig, grounds, symbols, std::move(axioms));
  return {sys, std::move(values), std::move(r)};
}

/// 1 if A(s) ∈ Δ, else 0.
inline int classical_indicator(const std::string& A, const std::string& state, const pl::IntervalSet& D,
                               const EffectiveClassicalRep& e) {
  return D.member(e.system.quantity(A).at(e.system.state_index(state))) ? 1 : 0;
}

/// Translates a PL formula over the system's quantities into L(S) (atoms
/// A ∈ Δ become A(s) ∈ D_k with D_k : PR fixed to Δ) and evaluates it in the
/// representation, returning the set of states where it is true.
inline Bitset classical_ls_extension(const pl::FormulaPtr& f, const EffectiveClassicalRep& e) {
  std::vector<pl::IntervalSet> deltas;
  const auto s = ls::var("s", Type::sigma());
  std::function<TermPtr(const pl::FormulaPtr&)> tr = [&](const pl::FormulaPtr& g) -> TermPtr {
    using K = pl::Formula::Kind;
    switch (g->kind) {
      case K::Atom: {
        if (!g->range) throw InvalidStructureError("abstract atom `" + g->name + "` has no classical reading");
        deltas.push_back(*g->range);
        return ls::in(ls::app(g->name, s), ls::var("D" + std::to_string(deltas.size()), Type::power(Type::r())));
      }
      case K::Not: return ls::lnot(tr(g->lhs));
      case K::And: return ls::land(tr(g->lhs), tr(g->rhs));
      case K::Or: return ls::lor(tr(g->lhs), tr(g->rhs));
      case K::Implies: return ls::limp(tr(g->lhs), tr(g->rhs));
    }
    throw InvalidStructureError("unknown formula");
  };
  const auto t = tr(f);
  Context ctx{{"s", Type::sigma()}};
  for (std::size_t k = 0; k < deltas.size(); ++k) ctx.emplace_back("D" + std::to_string(k + 1), Type::power(Type::r()));
  std::vector<Elem> xs(ctx.size());
  for (std::size_t k = 0; k < deltas.size(); ++k) xs[k + 1] = e.delta(deltas[k]);
  Bitset out(e.system.states.size());
  for (std::size_t st = 0; st < out.size(); ++st) {
    xs[0] = st;
    if (interpret_at(t, ctx, 0, xs, e.rep) == e.rep.topos().top(0)) out.set(st);
  }
  return out;
}

}  // namespace toposlang::rep
