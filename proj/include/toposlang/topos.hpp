#pragma once

#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "toposlang/finite_category.hpp"
#include "toposlang/heyting.hpp"
#include "toposlang/presheaf.hpp"

namespace toposlang::topos {

inline constexpr std::size_t kDefaultEnumerationCap = std::size_t{1} << 20;

/// A product object with its projections. Elements at each stage are encoded
/// in mixed radix, first factor most significant; the empty product is the
/// terminal object.
struct ProductObject {
  Presheaf object;
  std::vector<Presheaf> factors;
  std::vector<NatTransform> projections;

  Elem encode(ObjId a, std::span<const Elem> xs) const {
    Elem idx = 0;
    for (std::size_t i = 0; i < factors.size(); ++i) idx = idx * factors[i].size(a) + xs[i];
    return idx;
  }
  std::vector<Elem> decode(ObjId a, Elem idx) const {
    std::vector<Elem> xs(factors.size());
    for (std::size_t i = factors.size(); i-- > 0;) {
      const std::size_t n = factors[i].size(a);
      xs[i] = idx % n;
      idx /= n;
    }
    return xs;
  }
};

/// Y^X with (Y^X)_A = Nat(y_A × X, Y). `elements[A][k]` is the k-th such
/// transformation, flattened over the stages of `domains[A]` = y_A × X.
struct ExponentialObject {
  Presheaf object;
  Presheaf exponent;  // X
  Presheaf value;     // Y
  std::vector<ProductObject> domains;
  std::vector<std::vector<std::size_t>> offsets;  // offsets[A][C]: start of stage C in a flat element
  std::vector<std::vector<std::vector<Elem>>> elements;
  std::vector<std::map<std::vector<Elem>, Elem>> index;
  std::vector<std::map<MorId, Elem>> rep_local;  // rep_local[A][h] = position of h in Hom(dom h, A)

  /// θ_C(h, x) for θ the k-th element at stage A, h: C -> A, x in X_C.
  Elem apply(ObjId a, Elem k, MorId h, Elem x) const {
    const ObjId c = exponent.base().dom(h);
    const std::array<Elem, 2> pair{rep_local[a].at(h), x};
    return elements[a][k][offsets[a][c] + domains[a].encode(c, pair)];
  }
};

/// The topos of presheaves on a finite category: classifier kit, sub-objects,
/// products, exponentials, power objects and global elements. Immutable once
/// built; Ω and its Heyting data are computed eagerly.
class Topos {
 public:
  explicit Topos(FiniteCategory base, std::size_t cap = kDefaultEnumerationCap)
      : Topos(std::make_shared<const FiniteCategory>(std::move(base)), cap) {}

  explicit Topos(CategoryPtr base, std::size_t cap = kDefaultEnumerationCap) : base_(std::move(base)), cap_(cap) {
    const auto& C = *base_;
    terminal_ = terminal_presheaf(base_);
    sieves_.resize(C.num_objects());
    sieve_index_.resize(C.num_objects());
    std::vector<std::vector<std::string>> stages(C.num_objects());
    for (ObjId a = 0; a < C.num_objects(); ++a) {
      sieves_[a] = cat::sieves_on(C, a, cap_);
      for (Elem i = 0; i < sieves_[a].size(); ++i) {
        sieve_index_[a].emplace(key(sieves_[a][i].members), i);
        stages[a].push_back(cat::sieve_label(C, sieves_[a][i]));
      }
    }
    std::vector<std::vector<Elem>> maps(C.num_morphisms());
    for (MorId f = 0; f < C.num_morphisms(); ++f)
      for (const auto& s : sieves_[C.cod(f)]) maps[f].push_back(sieve_index(cat::pullback_sieve(C, f, s)));
    omega_ = Presheaf(base_, std::move(stages), std::move(maps));
    std::vector<std::vector<Elem>> tcomp(C.num_objects());
    for (ObjId a = 0; a < C.num_objects(); ++a) tcomp[a] = {top(a)};
    true_ = NatTransform(terminal_, omega_, std::move(tcomp));
  }

  const FiniteCategory& base() const { return *base_; }
  const CategoryPtr& base_ptr() const { return base_; }
  std::size_t cap() const { return cap_; }

  // --- classifier kit -------------------------------------------------------

  const Presheaf& terminal() const { return terminal_; }
  const Presheaf& omega() const { return omega_; }
  const NatTransform& true_arrow() const { return true_; }

  const cat::Sieve& sieve(ObjId a, Elem s) const { return sieves_.at(a).at(s); }
  Elem sieve_index(const cat::Sieve& s) const {
    auto it = sieve_index_.at(s.target).find(key(s.members));
    if (it == sieve_index_.at(s.target).end()) throw UnknownElementError("not a sieve on '" + base().object(s.target) + "'");
    return it->second;
  }
  Elem top(ObjId a) const { return sieves_.at(a).size() - 1; }
  Elem bottom(ObjId) const { return 0; }

  Elem omega_meet(ObjId a, Elem s, Elem t) const {
    return sieve_index({a, sieves_[a][s].members & sieves_[a][t].members});
  }
  Elem omega_join(ObjId a, Elem s, Elem t) const {
    return sieve_index({a, sieves_[a][s].members | sieves_[a][t].members});
  }
  Elem omega_implies(ObjId a, Elem s, Elem t) const {
    return sieve_index(cat::sieve_implies(base(), sieves_[a][s], sieves_[a][t]));
  }
  bool omega_leq(ObjId a, Elem s, Elem t) const { return sieves_[a][s].members.is_subset_of(sieves_[a][t].members); }

  /// true ∘ !: X -> Ω
  NatTransform constant_true(const Presheaf& X) const { return compose(true_, to_terminal(X, terminal_)); }
  NatTransform constant_false(const Presheaf& X) const {
    std::vector<std::vector<Elem>> comps(base().num_objects());
    for (ObjId a = 0; a < comps.size(); ++a) comps[a].assign(X.size(a), bottom(a));
    return NatTransform(X, omega_, std::move(comps));
  }

  // --- sub-objects ----------------------------------------------------------

  /// χ_K,A(x) = {f: B -> A | X(f)(x) ∈ K_B}
  NatTransform characteristic(const Subobject& K) const {
    require_valid(K);
    const auto& X = K.ambient;
    const auto& C = base();
    std::vector<std::vector<Elem>> comps(C.num_objects());
    for (ObjId a = 0; a < C.num_objects(); ++a)
      for (Elem x = 0; x < X.size(a); ++x) {
        cat::Sieve s = cat::empty_sieve(C, a);
        for (auto f : C.into(a))
          if (K.parts[C.dom(f)].test(X.restrict(f, x))) s.members.set(f);
        comps[a].push_back(sieve_index(s));
      }
    return NatTransform(X, omega_, std::move(comps));
  }

  /// K^χ_A = χ_A^{-1}(↓A)
  Subobject subobject_of(const NatTransform& chi) const {
    if (!(chi.target() == omega_)) throw InvalidStructureError("characteristic arrow must land in Ω");
    if (auto r = validate_nat(chi); !r.ok()) throw InvalidStructureError("arrow is not natural: " + r.violations[0].detail);
    const auto& X = chi.source();
    Subobject K{X, {}};
    for (ObjId a = 0; a < base().num_objects(); ++a) {
      Bitset part(X.size(a));
      for (Elem x = 0; x < X.size(a); ++x)
        if (chi.at(a, x) == top(a)) part.set(x);
      K.parts.push_back(std::move(part));
    }
    return K;
  }

  Subobject whole(const Presheaf& X) const {
    Subobject K{X, {}};
    for (ObjId a = 0; a < base().num_objects(); ++a) K.parts.push_back(Bitset(X.size(a)).set());
    return K;
  }
  Subobject empty(const Presheaf& X) const {
    Subobject K{X, {}};
    for (ObjId a = 0; a < base().num_objects(); ++a) K.parts.push_back(Bitset(X.size(a)));
    return K;
  }

  /// Sub(X) in numeric order of the flattened membership bitmask (stages in
  /// object order, elements in index order).
  std::vector<Subobject> subobjects(const Presheaf& X) const {
    const auto offs = node_offsets(X);
    const std::size_t n = offs.back();
    std::vector<Bitset> down(n, Bitset(n));
    const auto& C = base();
    for (ObjId a = 0; a < C.num_objects(); ++a)
      for (Elem x = 0; x < X.size(a); ++x)
        for (auto f : C.into(a)) down[offs[a] + x].set(offs[C.dom(f)] + X.restrict(f, x));
    std::vector<Subobject> out;
    for (const auto& flat : enumerate_closed_subsets(down, cap_)) out.push_back(unflatten(X, flat, offs));
    return out;
  }

  /// (K ⇒ L)_A = {x | for all f: B -> A, X(f)(x) ∈ K_B implies X(f)(x) ∈ L_B}
  Subobject sub_implies(const Subobject& K, const Subobject& L) const {
    const auto& X = K.ambient;
    const auto& C = base();
    Subobject out = empty(X);
    for (ObjId a = 0; a < C.num_objects(); ++a)
      for (Elem x = 0; x < X.size(a); ++x) {
        bool ok = true;
        for (auto f : C.into(a)) {
          const ObjId b = C.dom(f);
          const Elem y = X.restrict(f, x);
          if (K.parts[b].test(y) && !L.parts[b].test(y)) {
            ok = false;
            break;
          }
        }
        if (ok) out.parts[a].set(x);
      }
    return out;
  }

  /// Pull a sub-object of X back along h: Y -> X.
  Subobject pullback_subobject(const NatTransform& h, const Subobject& K) const {
    if (!(h.target() == K.ambient)) throw InvalidStructureError("sub-object does not live on the arrow's codomain");
    Subobject out = empty(h.source());
    for (ObjId a = 0; a < base().num_objects(); ++a)
      for (Elem y = 0; y < h.source().size(a); ++y)
        if (K.parts[a].test(h.at(a, y))) out.parts[a].set(y);
    return out;
  }

  // --- limits and colimits --------------------------------------------------

  ProductObject product(std::vector<Presheaf> factors) const {
    const auto& C = base();
    for (const auto& F : factors)
      if (!F.same_base(terminal_)) throw InvalidStructureError("product of presheaves on different bases");
    ProductObject P;
    P.factors = std::move(factors);
    std::vector<std::vector<std::string>> stages(C.num_objects());
    for (ObjId a = 0; a < C.num_objects(); ++a) {
      std::size_t n = 1;
      for (const auto& F : P.factors) n *= F.size(a);
      guard(n, "product stage");
      for (Elem i = 0; i < n; ++i) {
        if (P.factors.empty()) {
          stages[a].push_back("*");
          break;
        }
        auto xs = P.decode(a, i);
        std::vector<std::string> parts;
        for (std::size_t k = 0; k < xs.size(); ++k) parts.push_back(P.factors[k].label(a, xs[k]));
        stages[a].push_back("(" + join(parts, ",") + ")");
      }
    }
    std::vector<std::vector<Elem>> maps(C.num_morphisms());
    for (MorId f = 0; f < C.num_morphisms(); ++f) {
      const ObjId a = C.cod(f), b = C.dom(f);
      for (Elem i = 0; i < stages[a].size(); ++i) {
        auto xs = P.decode(a, i);
        for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = P.factors[k].restrict(f, xs[k]);
        maps[f].push_back(P.encode(b, xs));
      }
    }
    P.object = Presheaf(base_, std::move(stages), std::move(maps));
    for (std::size_t k = 0; k < P.factors.size(); ++k) {
      std::vector<std::vector<Elem>> comps(C.num_objects());
      for (ObjId a = 0; a < C.num_objects(); ++a)
        for (Elem i = 0; i < P.object.size(a); ++i) comps[a].push_back(P.decode(a, i)[k]);
      P.projections.emplace_back(P.object, P.factors[k], std::move(comps));
    }
    return P;
  }

  /// ⟨f_1, ..., f_n⟩: Z -> P for arrows f_i: Z -> P.factors[i].
  NatTransform pair(const ProductObject& P, const std::vector<NatTransform>& arrows) const {
    if (arrows.size() != P.factors.size()) throw InvalidStructureError("pairing needs one arrow per factor");
    if (P.factors.empty()) throw InvalidStructureError("pairing into the empty product needs a source");
    const Presheaf& Z = arrows.front().source();
    std::vector<std::vector<Elem>> comps(base().num_objects());
    for (ObjId a = 0; a < comps.size(); ++a)
      for (Elem z = 0; z < Z.size(a); ++z) {
        std::vector<Elem> xs;
        for (std::size_t k = 0; k < arrows.size(); ++k) {
          if (!(arrows[k].source() == Z) || !(arrows[k].target() == P.factors[k]))
            throw InvalidStructureError("pairing arrows do not match the product factors");
          xs.push_back(arrows[k].at(a, z));
        }
        comps[a].push_back(P.encode(a, xs));
      }
    return NatTransform(Z, P.object, std::move(comps));
  }

  /// f_1 × ... × f_n : P -> Q
  NatTransform product_map(const ProductObject& P, const ProductObject& Q, const std::vector<NatTransform>& fs) const {
    if (fs.size() != P.factors.size() || fs.size() != Q.factors.size())
      throw InvalidStructureError("product map arity mismatch");
    std::vector<std::vector<Elem>> comps(base().num_objects());
    for (ObjId a = 0; a < comps.size(); ++a)
      for (Elem i = 0; i < P.object.size(a); ++i) {
        auto xs = P.decode(a, i);
        for (std::size_t k = 0; k < xs.size(); ++k) xs[k] = fs[k].at(a, xs[k]);
        comps[a].push_back(Q.encode(a, xs));
      }
    return NatTransform(P.object, Q.object, std::move(comps));
  }

  /// X + Y with injections labelled inl(x), inr(y).
  Presheaf coproduct(const Presheaf& X, const Presheaf& Y) const {
    const auto& C = base();
    std::vector<std::vector<std::string>> stages(C.num_objects());
    for (ObjId a = 0; a < C.num_objects(); ++a) {
      for (const auto& l : X.labels(a)) stages[a].push_back("inl(" + l + ")");
      for (const auto& l : Y.labels(a)) stages[a].push_back("inr(" + l + ")");
    }
    std::vector<std::vector<Elem>> maps(C.num_morphisms());
    for (MorId f = 0; f < C.num_morphisms(); ++f) {
      const ObjId a = C.cod(f), b = C.dom(f);
      for (Elem x = 0; x < X.size(a); ++x) maps[f].push_back(X.restrict(f, x));
      for (Elem y = 0; y < Y.size(a); ++y) maps[f].push_back(X.size(b) + Y.restrict(f, y));
    }
    return Presheaf(base_, std::move(stages), std::move(maps));
  }

  Presheaf initial() const { return initial_presheaf(base_); }

  // --- arrows and exponentials ----------------------------------------------

  /// Nat(P, Y), found by backtracking over stage elements with every forced
  /// value propagated along all morphisms into the stage. Canonical order:
  /// lexicographic on components, objects in order.
  std::vector<NatTransform> hom(const Presheaf& P, const Presheaf& Y) const {
    std::vector<NatTransform> out;
    const auto offs = node_offsets(P);
    for_each_nat(P, Y, [&](const std::vector<Elem>& flat) {
      out.emplace_back(P, Y, split(P, flat, offs));
    });
    return out;
  }

  std::size_t count_hom(const Presheaf& P, const Presheaf& Y) const {
    std::size_t n = 0;
    for_each_nat(P, Y, [&](const std::vector<Elem>&) { ++n; });
    return n;
  }

  ExponentialObject exponential(const Presheaf& X, const Presheaf& Y) const {
    const auto& C = base();
    ExponentialObject E;
    E.exponent = X;
    E.value = Y;
    E.domains.reserve(C.num_objects());
    E.rep_local.resize(C.num_objects());
    E.elements.resize(C.num_objects());
    E.index.resize(C.num_objects());
    const bool power = Y == omega_;
    std::vector<std::vector<std::string>> stages(C.num_objects());
    for (ObjId a = 0; a < C.num_objects(); ++a) {
      for (ObjId b = 0; b < C.num_objects(); ++b) {
        auto hs = C.hom(b, a);
        for (Elem i = 0; i < hs.size(); ++i) E.rep_local[a][hs[i]] = i;
      }
      E.domains.push_back(product({representable(base_, a), X}));
      E.offsets.push_back(node_offsets(E.domains[a].object));
      for_each_nat(E.domains[a].object, Y, [&](const std::vector<Elem>& flat) {
        guard(E.elements[a].size() + 1, "exponential stage");
        E.index[a].emplace(flat, E.elements[a].size());
        E.elements[a].push_back(flat);
      });
      for (const auto& flat : E.elements[a])
        stages[a].push_back(power ? power_label(E, a, flat) : arrow_label(E, a, flat));
    }
    // restriction along f: B -> A sends θ to (f*θ)_C(h, x) = θ_C(f∘h, x)
    std::vector<std::vector<Elem>> maps(C.num_morphisms());
    for (MorId f = 0; f < C.num_morphisms(); ++f) {
      const ObjId a = C.cod(f), b = C.dom(f);
      const auto& dom_b = E.domains[b];
      for (const auto& theta : E.elements[a]) {
        std::vector<Elem> flat(E.offsets[b].back());
        for (ObjId c = 0; c < C.num_objects(); ++c)
          for (Elem i = 0; i < dom_b.object.size(c); ++i) {
            auto hx = dom_b.decode(c, i);
            const MorId h = C.hom(c, b).at(hx[0]);
            const std::array<Elem, 2> pair{E.rep_local[a].at(C.compose(f, h)), hx[1]};
            flat[E.offsets[b][c] + i] = theta[E.offsets[a][c] + E.domains[a].encode(c, pair)];
          }
        maps[f].push_back(E.index[b].at(flat));
      }
    }
    E.object = Presheaf(base_, std::move(stages), std::move(maps));
    return E;
  }

  /// PX = Ω^X
  ExponentialObject power_object(const Presheaf& X) const { return exponential(X, omega_); }

  /// ev: X × Y^X -> Y, ev_A(x, θ) = θ_A(id_A, x). `P` must be product({X, E.object}).
  NatTransform evaluation(const ExponentialObject& E, const ProductObject& P) const {
    check_factors(P, {E.exponent, E.object});
    std::vector<std::vector<Elem>> comps(base().num_objects());
    for (ObjId a = 0; a < comps.size(); ++a)
      for (Elem i = 0; i < P.object.size(a); ++i) {
        auto xs = P.decode(a, i);
        comps[a].push_back(E.apply(a, xs[1], base().identity(a), xs[0]));
      }
    return NatTransform(P.object, E.value, std::move(comps));
  }

  /// f: Z × X -> Y  ↦  Z -> Y^X, (g_A(z))_C(h, x) = f_C(Z(h)(z), x).
  NatTransform transpose(const NatTransform& f, const ProductObject& zx, const ExponentialObject& E) const {
    if (zx.factors.size() != 2 || !(zx.factors[1] == E.exponent) || !(f.source() == zx.object) ||
        !(f.target() == E.value))
      throw InvalidStructureError("transpose: arrow shape does not match Z × X -> Y");
    const auto& C = base();
    const Presheaf& Z = zx.factors[0];
    std::vector<std::vector<Elem>> comps(C.num_objects());
    for (ObjId a = 0; a < C.num_objects(); ++a)
      for (Elem z = 0; z < Z.size(a); ++z) {
        std::vector<Elem> flat(E.offsets[a].back());
        const auto& dom = E.domains[a];
        for (ObjId c = 0; c < C.num_objects(); ++c)
          for (Elem i = 0; i < dom.object.size(c); ++i) {
            auto hx = dom.decode(c, i);
            const MorId h = C.hom(c, a).at(hx[0]);
            const std::array<Elem, 2> pair{Z.restrict(h, z), hx[1]};
            flat[E.offsets[a][c] + i] = f.at(c, zx.encode(c, pair));
          }
        comps[a].push_back(E.index[a].at(flat));
      }
    return NatTransform(Z, E.object, std::move(comps));
  }

  /// g: Z -> Y^X  ↦  Z × X -> Y, f_A(z, x) = g_A(z)_A(id_A, x).
  NatTransform untranspose(const NatTransform& g, const ProductObject& zx, const ExponentialObject& E) const {
    if (zx.factors.size() != 2 || !(zx.factors[0] == g.source()) || !(zx.factors[1] == E.exponent) ||
        !(g.target() == E.object))
      throw InvalidStructureError("untranspose: arrow shape does not match Z -> Y^X");
    std::vector<std::vector<Elem>> comps(base().num_objects());
    for (ObjId a = 0; a < comps.size(); ++a)
      for (Elem i = 0; i < zx.object.size(a); ++i) {
        auto zxs = zx.decode(a, i);
        comps[a].push_back(E.apply(a, g.at(a, zxs[0]), base().identity(a), zxs[1]));
      }
    return NatTransform(zx.object, E.value, std::move(comps));
  }

  /// The name of a sub-object: the global element 1 -> PX transposing χ_K.
  GlobalElement name_of(const Subobject& K, const ExponentialObject& PX) const {
    const auto chi = characteristic(K);
    const auto one_x = product({terminal_, K.ambient});
    const auto f = compose(chi, one_x.projections[1]);
    const auto g = transpose(f, one_x, PX);
    GlobalElement out{PX.object, {}};
    for (ObjId a = 0; a < base().num_objects(); ++a) out.choice.push_back(g.at(a, 0));
    return out;
  }

  std::vector<GlobalElement> global_elements(const Presheaf& X) const {
    std::vector<GlobalElement> out;
    for_each_nat(terminal_, X, [&](const std::vector<Elem>& flat) { out.push_back({X, flat}); });
    return out;
  }

  /// The arrow 1 -> X picking a global element.
  NatTransform arrow_of(const GlobalElement& g) const {
    std::vector<std::vector<Elem>> comps(base().num_objects());
    for (ObjId a = 0; a < comps.size(); ++a) comps[a] = {g.choice.at(a)};
    return NatTransform(terminal_, g.of, std::move(comps));
  }

  /// Γ(Ω) as a Heyting algebra under stagewise sieve operations. A global
  /// element of Ω is the union of its (disjoint) stage sieves.
  heyting::SetAlgebra truth_values() const {
    std::vector<std::string> names;
    for (const auto& m : base().morphisms()) names.push_back(m.name);
    std::vector<Bitset> sets;
    std::vector<std::string> labels;
    for (const auto& g : global_elements(omega_)) {
      Bitset all(base().num_morphisms());
      std::vector<std::string> parts;
      for (ObjId a = 0; a < base().num_objects(); ++a) {
        all |= sieves_[a][g.choice[a]].members;
        parts.push_back(base().object(a) + ":" + omega_.label(a, g.choice[a]));
      }
      sets.push_back(all);
      labels.push_back("[" + join(parts, ";") + "]");
    }
    return heyting::SetAlgebra(names, sets, labels);
  }

 private:
  static std::string key(const Bitset& b) {
    std::string s;
    boost::to_string(b, s);
    return s;
  }

  void guard(std::size_t n, const char* what) const {
    if (n > cap_) throw CapExceededError(std::string(what) + " exceeds the enumeration cap of " + std::to_string(cap_));
  }

  void require_valid(const Subobject& K) const {
    if (auto r = validate_subobject(K); !r.ok()) throw InvalidStructureError("not a sub-object: " + r.violations[0].detail);
  }

  static void check_factors(const ProductObject& P, const std::vector<Presheaf>& expected) {
    if (P.factors.size() != expected.size()) throw InvalidStructureError("product has the wrong factors");
    for (std::size_t i = 0; i < expected.size(); ++i)
      if (!(P.factors[i] == expected[i])) throw InvalidStructureError("product has the wrong factors");
  }

  std::vector<std::size_t> node_offsets(const Presheaf& X) const {
    std::vector<std::size_t> offs{0};
    for (ObjId a = 0; a < base().num_objects(); ++a) offs.push_back(offs.back() + X.size(a));
    return offs;
  }

  Subobject unflatten(const Presheaf& X, const Bitset& flat, const std::vector<std::size_t>& offs) const {
    Subobject K = empty(X);
    for (auto i : bitset_members(flat)) {
      const ObjId a = std::upper_bound(offs.begin(), offs.end(), i) - offs.begin() - 1;
      K.parts[a].set(i - offs[a]);
    }
    return K;
  }

  std::vector<std::vector<Elem>> split(const Presheaf& P, const std::vector<Elem>& flat,
                                       const std::vector<std::size_t>& offs) const {
    std::vector<std::vector<Elem>> comps(base().num_objects());
    for (ObjId a = 0; a < comps.size(); ++a)
      comps[a].assign(flat.begin() + offs[a], flat.begin() + offs[a] + P.size(a));
    return comps;
  }

  void for_each_nat(const Presheaf& P, const Presheaf& Y, const std::function<void(const std::vector<Elem>&)>& emit) const {
    const auto& C = base();
    const auto offs = node_offsets(P);
    const std::size_t n = offs.back();
    constexpr Elem kUnset = static_cast<Elem>(-1);
    std::vector<Elem> val(n, kUnset);
    std::vector<std::vector<MorId>> into(C.num_objects());
    for (ObjId a = 0; a < C.num_objects(); ++a) into[a] = C.into(a);
    // nodes of objects with many incoming morphisms force the most values
    std::vector<ObjId> objs(C.num_objects());
    std::iota(objs.begin(), objs.end(), 0);
    std::stable_sort(objs.begin(), objs.end(), [&](ObjId a, ObjId b) { return into[a].size() > into[b].size(); });
    std::vector<std::pair<ObjId, Elem>> order;
    for (auto a : objs)
      for (Elem p = 0; p < P.size(a); ++p) order.emplace_back(a, p);
    // order above is a search order; emit requires canonical order, so collect
    // and sort when the search order differs from object order
    const bool canonical = std::is_sorted(objs.begin(), objs.end());
    std::vector<std::vector<Elem>> collected;
    std::size_t produced = 0;
    std::vector<std::size_t> trail;

    auto assign = [&](std::size_t pos, auto&& self) -> void {
      while (pos < order.size() && val[offs[order[pos].first] + order[pos].second] != kUnset) ++pos;
      if (pos == order.size()) {
        if (++produced > cap_) throw CapExceededError("hom-set enumeration exceeds the cap of " + std::to_string(cap_));
        if (canonical)
          emit(val);
        else
          collected.push_back(val);
        return;
      }
      const auto [a, p] = order[pos];
      for (Elem y = 0; y < Y.size(a); ++y) {
        const std::size_t mark = trail.size();
        bool ok = true;
        for (auto f : into[a]) {
          const std::size_t node = offs[C.dom(f)] + P.restrict(f, p);
          const Elem forced = Y.restrict(f, y);
          if (val[node] == kUnset) {
            val[node] = forced;
            trail.push_back(node);
          } else if (val[node] != forced) {
            ok = false;
            break;
          }
        }
        if (ok) self(pos + 1, self);
        while (trail.size() > mark) {
          val[trail.back()] = kUnset;
          trail.pop_back();
        }
      }
    };
    assign(0, assign);
    if (!canonical) {
      std::sort(collected.begin(), collected.end());
      for (const auto& v : collected) emit(v);
    }
  }

  std::string arrow_label(const ExponentialObject& E, ObjId a, const std::vector<Elem>& flat) const {
    std::vector<std::string> parts;
    const auto& C = base();
    for (ObjId c = 0; c < C.num_objects(); ++c)
      for (Elem i = 0; i < E.domains[a].object.size(c); ++i)
        parts.push_back(E.domains[a].object.label(c, i) + "->" + E.value.label(c, flat[E.offsets[a][c] + i]));
    return "<" + join(parts, ",") + ">";
  }

  /// A power-object element as the sub-object of y_A × X where it is true;
  /// on the one-object base this is just the subset of X.
  std::string power_label(const ExponentialObject& E, ObjId a, const std::vector<Elem>& flat) const {
    std::vector<std::string> parts;
    const auto& C = base();
    const bool set_case = C.num_morphisms() == 1;
    for (ObjId c = 0; c < C.num_objects(); ++c)
      for (Elem i = 0; i < E.domains[a].object.size(c); ++i)
        if (flat[E.offsets[a][c] + i] == top(c)) {
          auto hx = E.domains[a].decode(c, i);
          const auto& x = E.exponent.label(c, hx[1]);
          parts.push_back(set_case ? x : C.name(C.hom(c, a).at(hx[0])) + ":" + x);
        }
    return "{" + join(parts, ",") + "}";
  }

  CategoryPtr base_;
  std::size_t cap_;
  Presheaf terminal_, omega_;
  NatTransform true_;
  std::vector<std::vector<cat::Sieve>> sieves_;
  std::vector<std::map<std::string, Elem>> sieve_index_;
};

/// Sub(X) as a Heyting algebra under componentwise ∩ and ∪. Element ids follow
/// Topos::subobjects order.
class SubobjectAlgebra : public heyting::SetAlgebra {
 public:
  SubobjectAlgebra(const Topos& T, const Presheaf& X, std::size_t size_cap = heyting::kDefaultSizeCap)
      : SubobjectAlgebra(T, X, T.subobjects(X), size_cap) {}

  const Presheaf& ambient() const { return ambient_; }
  Subobject subobject(heyting::ElemId e) const {
    Subobject K{ambient_, {}};
    const Bitset& flat = set(e);
    std::size_t off = 0;
    for (ObjId a = 0; a < ambient_.base().num_objects(); ++a) {
      Bitset part(ambient_.size(a));
      for (Elem x = 0; x < ambient_.size(a); ++x)
        if (flat.test(off + x)) part.set(x);
      K.parts.push_back(std::move(part));
      off += ambient_.size(a);
    }
    return K;
  }
  heyting::ElemId index_of_subobject(const Subobject& K) const { return index_of(flatten(K)); }

  static Bitset flatten(const Subobject& K) {
    Bitset flat(K.ambient.total_size());
    std::size_t off = 0;
    for (const auto& part : K.parts) {
      for (auto x : bitset_members(part)) flat.set(off + x);
      off += part.size();
    }
    return flat;
  }

 private:
  SubobjectAlgebra(const Topos& T, const Presheaf& X, const std::vector<Subobject>& subs, std::size_t size_cap)
      : heyting::SetAlgebra(points_of(T, X), flats(subs), labels(subs), size_cap), ambient_(X) {}

  static std::vector<std::string> points_of(const Topos& T, const Presheaf& X) {
    std::vector<std::string> pts;
    for (ObjId a = 0; a < T.base().num_objects(); ++a)
      for (const auto& l : X.labels(a)) pts.push_back(T.base().object(a) + ":" + l);
    return pts;
  }
  static std::vector<Bitset> flats(const std::vector<Subobject>& subs) {
    std::vector<Bitset> out;
    for (const auto& K : subs) out.push_back(flatten(K));
    return out;
  }
  static std::vector<std::string> labels(const std::vector<Subobject>& subs) {
    std::vector<std::string> out;
    for (const auto& K : subs) out.push_back(subobject_label(K));
    return out;
  }

  Presheaf ambient_;
};

inline SubobjectAlgebra sub_heyting(const Topos& T, const Presheaf& X) { return SubobjectAlgebra(T, X); }

/// Hom(Z × X, Y) ≅ Hom(Z, Y^X), checked by exhaustion.
struct AdjunctionReport {
  std::size_t left = 0;   // |Hom(Z × X, Y)|
  std::size_t right = 0;  // |Hom(Z, Y^X)|
  bool transpose_injective = true;
  bool round_trip = true;
  bool ok() const { return left == right && transpose_injective && round_trip; }
};

inline AdjunctionReport verify_exponential_adjunction(const Topos& T, const Presheaf& Z, const Presheaf& X,
                                                      const Presheaf& Y) {
  AdjunctionReport r;
  const auto zx = T.product({Z, X});
  const auto E = T.exponential(X, Y);
  const auto lefts = T.hom(zx.object, Y);
  const auto rights = T.hom(Z, E.object);
  r.left = lefts.size();
  r.right = rights.size();
  std::map<std::vector<std::vector<Elem>>, std::size_t> seen;
  for (const auto& f : lefts) {
    const auto g = T.transpose(f, zx, E);
    if (!seen.emplace(g.components(), 1).second) r.transpose_injective = false;
    if (!(T.untranspose(g, zx, E) == f)) r.round_trip = false;
  }
  for (const auto& g : rights)
    if (!(T.transpose(T.untranspose(g, zx, E), zx, E) == g)) r.round_trip = false;
  return r;
}

}  // namespace toposlang::topos
