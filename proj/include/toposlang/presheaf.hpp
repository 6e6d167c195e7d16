#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "toposlang/common.hpp"
#include "toposlang/finite_category.hpp"

namespace toposlang::topos {

using cat::FiniteCategory;
using cat::MorId;
using cat::ObjId;
using Elem = std::size_t;
using CategoryPtr = std::shared_ptr<const FiniteCategory>;

/// A contravariant functor from a finite category to finite sets. Stage A
/// holds elements 0..size(A)-1; restriction(f) for f: B -> A maps X_A to X_B.
/// Cheap to copy: the tables are shared and immutable.
class Presheaf {
 public:
  Presheaf() = default;

  Presheaf(CategoryPtr base, std::vector<std::vector<std::string>> stages, std::vector<std::vector<Elem>> restrictions) {
    auto d = std::make_shared<Data>(Data{std::move(base), std::move(stages), std::move(restrictions), {}});
    if (!d->base) throw InvalidStructureError("presheaf needs a base category");
    if (d->stages.size() != d->base->num_objects()) throw InvalidStructureError("presheaf needs one stage per object");
    if (d->restrictions.size() != d->base->num_morphisms())
      throw InvalidStructureError("presheaf needs one restriction map per morphism");
    d->index.resize(d->stages.size());
    for (std::size_t a = 0; a < d->stages.size(); ++a)
      for (std::size_t x = 0; x < d->stages[a].size(); ++x) d->index[a].emplace(d->stages[a][x], x);
    data_ = std::move(d);
  }

  bool valid() const { return data_ != nullptr; }
  const FiniteCategory& base() const { return *data_->base; }
  const CategoryPtr& base_ptr() const { return data_->base; }

  std::size_t size(ObjId a) const { return data_->stages.at(a).size(); }
  const std::vector<std::string>& labels(ObjId a) const { return data_->stages.at(a); }
  const std::string& label(ObjId a, Elem x) const { return data_->stages.at(a).at(x); }
  Elem find(ObjId a, const std::string& label) const {
    const auto& idx = data_->index.at(a);
    auto it = idx.find(label);
    if (it == idx.end())
      throw UnknownElementError("no element '" + label + "' at stage '" + base().object(a) + "'");
    return it->second;
  }
  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& s : data_->stages) n += s.size();
    return n;
  }

  const std::vector<Elem>& restriction(MorId f) const { return data_->restrictions.at(f); }
  /// X(f)(x) for f: B -> A and x in X_A.
  Elem restrict(MorId f, Elem x) const { return data_->restrictions.at(f).at(x); }

  bool same_base(const Presheaf& o) const {
    return data_->base == o.data_->base || *data_->base == *o.data_->base;
  }

  bool operator==(const Presheaf& o) const {
    if (data_ == o.data_) return true;
    if (!data_ || !o.data_) return false;
    return same_base(o) && data_->stages == o.data_->stages && data_->restrictions == o.data_->restrictions;
  }

 private:
  struct Data {
    CategoryPtr base;
    std::vector<std::vector<std::string>> stages;
    std::vector<std::vector<Elem>> restrictions;
    std::vector<std::map<std::string, Elem>> index;
  };
  std::shared_ptr<const Data> data_;
};

/// A family of stage maps N_A: X_A -> Y_A. Naturality is checked by
/// validate_nat, not on construction.
class NatTransform {
 public:
  NatTransform() = default;
  NatTransform(Presheaf source, Presheaf target, std::vector<std::vector<Elem>> components)
      : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
    if (!source_.same_base(target_)) throw InvalidStructureError("natural transformation between different bases");
    if (components_.size() != source_.base().num_objects())
      throw InvalidStructureError("natural transformation needs one component per object");
  }

  const Presheaf& source() const { return source_; }
  const Presheaf& target() const { return target_; }
  const std::vector<Elem>& component(ObjId a) const { return components_.at(a); }
  const std::vector<std::vector<Elem>>& components() const { return components_; }
  Elem at(ObjId a, Elem x) const { return components_.at(a).at(x); }

  bool operator==(const NatTransform& o) const {
    return components_ == o.components_ && source_ == o.source_ && target_ == o.target_;
  }

 private:
  Presheaf source_, target_;
  std::vector<std::vector<Elem>> components_;
};

/// K_A ⊆ X_A for every stage, stable under restriction.
struct Subobject {
  Presheaf ambient;
  std::vector<Bitset> parts;

  bool operator==(const Subobject& o) const { return parts == o.parts && ambient == o.ambient; }
  bool contains(ObjId a, Elem x) const { return parts.at(a).test(x); }
};

/// A matching family: choice[A] in X_A with X(f)(choice[A]) = choice[B].
struct GlobalElement {
  Presheaf of;
  std::vector<Elem> choice;
  bool operator==(const GlobalElement& o) const { return choice == o.choice && of == o.of; }
};

struct FunctorViolation {
  std::string kind;
  std::string detail;
};

struct FunctorReport {
  std::vector<FunctorViolation> violations;
  bool ok() const { return violations.empty(); }
  bool has(const std::string& kind) const {
    for (const auto& v : violations)
      if (v.kind == kind) return true;
    return false;
  }
};

/// Totality of every restriction map, X(id) = id and X(f∘g) = X(g)∘X(f).
inline FunctorReport validate_presheaf(const Presheaf& X) {
  FunctorReport r;
  const auto& C = X.base();
  bool total = true;
  for (MorId f = 0; f < C.num_morphisms(); ++f) {
    const auto& map = X.restriction(f);
    if (map.size() != X.size(C.cod(f))) {
      r.violations.push_back({"totality", "restriction along " + C.name(f) + " is not defined on all of stage '" +
                                              C.object(C.cod(f)) + "'"});
      total = false;
      continue;
    }
    for (Elem x = 0; x < map.size(); ++x)
      if (map[x] >= X.size(C.dom(f))) {
        r.violations.push_back({"totality", "restriction along " + C.name(f) + " sends '" +
                                                X.label(C.cod(f), x) + "' outside stage '" +
                                                C.object(C.dom(f)) + "'"});
        total = false;
      }
  }
  if (!total) return r;
  for (ObjId a = 0; a < C.num_objects(); ++a) {
    const auto& map = X.restriction(C.identity(a));
    for (Elem x = 0; x < map.size(); ++x)
      if (map[x] != x) r.violations.push_back({"identity", "X(id_" + C.object(a) + ") moves '" + X.label(a, x) + "'"});
  }
  for (MorId f = 0; f < C.num_morphisms(); ++f)
    for (MorId g = 0; g < C.num_morphisms(); ++g) {
      if (C.cod(g) != C.dom(f)) continue;
      auto fg = C.try_compose(f, g);
      if (!fg) continue;
      for (Elem x = 0; x < X.size(C.cod(f)); ++x)
        if (X.restrict(*fg, x) != X.restrict(g, X.restrict(f, x)))
          r.violations.push_back({"composition", "X(" + C.name(*fg) + ") != X(" + C.name(g) + ")∘X(" + C.name(f) +
                                                     ") at '" + X.label(C.cod(f), x) + "'"});
    }
  return r;
}

/// Totality of components and Y(f)∘N_A = N_B∘X(f) for every f: B -> A.
inline FunctorReport validate_nat(const NatTransform& N) {
  FunctorReport r;
  const auto& X = N.source();
  const auto& Y = N.target();
  const auto& C = X.base();
  for (ObjId a = 0; a < C.num_objects(); ++a) {
    const auto& comp = N.component(a);
    if (comp.size() != X.size(a)) {
      r.violations.push_back({"totality", "component at '" + C.object(a) + "' has the wrong domain"});
      return r;
    }
    for (auto y : comp)
      if (y >= Y.size(a)) {
        r.violations.push_back({"totality", "component at '" + C.object(a) + "' leaves the target stage"});
        return r;
      }
  }
  for (MorId f = 0; f < C.num_morphisms(); ++f) {
    const ObjId a = C.cod(f), b = C.dom(f);
    for (Elem x = 0; x < X.size(a); ++x)
      if (Y.restrict(f, N.at(a, x)) != N.at(b, X.restrict(f, x)))
        r.violations.push_back({"naturality", "square for " + C.name(f) + " fails at '" + X.label(a, x) + "'"});
  }
  return r;
}

inline FunctorReport validate_subobject(const Subobject& K) {
  FunctorReport r;
  const auto& X = K.ambient;
  const auto& C = X.base();
  if (K.parts.size() != C.num_objects()) {
    r.violations.push_back({"shape", "sub-object needs one part per stage"});
    return r;
  }
  for (ObjId a = 0; a < C.num_objects(); ++a)
    if (K.parts[a].size() != X.size(a)) {
      r.violations.push_back({"shape", "part at '" + C.object(a) + "' has the wrong width"});
      return r;
    }
  for (MorId f = 0; f < C.num_morphisms(); ++f)
    for (auto x : bitset_members(K.parts[C.cod(f)]))
      if (!K.parts[C.dom(f)].test(X.restrict(f, x)))
        r.violations.push_back({"closure", "'" + X.label(C.cod(f), x) + "' in K_" + C.object(C.cod(f)) +
                                               " restricts along " + C.name(f) + " outside K_" +
                                               C.object(C.dom(f))});
  return r;
}

// --- basic constructions ----------------------------------------------------

/// Every stage is `labels`, every restriction the identity.
inline Presheaf constant_presheaf(CategoryPtr C, const std::vector<std::string>& labels) {
  std::vector<std::vector<std::string>> stages(C->num_objects(), labels);
  std::vector<Elem> id(labels.size());
  for (Elem i = 0; i < id.size(); ++i) id[i] = i;
  std::vector<std::vector<Elem>> maps(C->num_morphisms(), id);
  return Presheaf(C, std::move(stages), std::move(maps));
}

inline Presheaf terminal_presheaf(CategoryPtr C) { return constant_presheaf(std::move(C), {"*"}); }

inline Presheaf initial_presheaf(CategoryPtr C) { return constant_presheaf(std::move(C), {}); }

/// y_A = Hom(-, A), restricting by precomposition.
inline Presheaf representable(CategoryPtr C, ObjId a) {
  std::vector<std::vector<std::string>> stages(C->num_objects());
  std::vector<std::vector<MorId>> homs(C->num_objects());
  std::vector<std::map<MorId, Elem>> local(C->num_objects());
  for (ObjId b = 0; b < C->num_objects(); ++b) {
    homs[b] = C->hom(b, a);
    for (Elem i = 0; i < homs[b].size(); ++i) {
      stages[b].push_back(C->name(homs[b][i]));
      local[b][homs[b][i]] = i;
    }
  }
  std::vector<std::vector<Elem>> maps(C->num_morphisms());
  for (MorId f = 0; f < C->num_morphisms(); ++f) {
    const ObjId b = C->cod(f), c = C->dom(f);
    for (auto h : homs[b]) maps[f].push_back(local[c].at(C->compose(h, f)));
  }
  return Presheaf(C, std::move(stages), std::move(maps));
}

/// The presheaf carried by a sub-object, with inherited labels.
inline Presheaf subpresheaf(const Subobject& K) {
  const auto& X = K.ambient;
  const auto& C = X.base();
  std::vector<std::vector<std::string>> stages(C.num_objects());
  std::vector<std::map<Elem, Elem>> local(C.num_objects());
  for (ObjId a = 0; a < C.num_objects(); ++a)
    for (auto x : bitset_members(K.parts[a])) {
      local[a][x] = stages[a].size();
      stages[a].push_back(X.label(a, x));
    }
  std::vector<std::vector<Elem>> maps(C.num_morphisms());
  for (MorId f = 0; f < C.num_morphisms(); ++f)
    for (auto x : bitset_members(K.parts[C.cod(f)])) maps[f].push_back(local[C.dom(f)].at(X.restrict(f, x)));
  return Presheaf(X.base_ptr(), std::move(stages), std::move(maps));
}

inline NatTransform identity_arrow(const Presheaf& X) {
  std::vector<std::vector<Elem>> comps(X.base().num_objects());
  for (ObjId a = 0; a < comps.size(); ++a)
    for (Elem x = 0; x < X.size(a); ++x) comps[a].push_back(x);
  return NatTransform(X, X, std::move(comps));
}

/// n∘m
inline NatTransform compose(const NatTransform& n, const NatTransform& m) {
  if (!(m.target() == n.source())) throw InvalidStructureError("arrows do not compose: codomain/domain mismatch");
  std::vector<std::vector<Elem>> comps(m.components().size());
  for (ObjId a = 0; a < comps.size(); ++a)
    for (auto y : m.component(a)) comps[a].push_back(n.at(a, y));
  return NatTransform(m.source(), n.target(), std::move(comps));
}

/// The unique arrow X -> 1.
inline NatTransform to_terminal(const Presheaf& X, const Presheaf& one) {
  std::vector<std::vector<Elem>> comps(X.base().num_objects());
  for (ObjId a = 0; a < comps.size(); ++a) comps[a].assign(X.size(a), 0);
  return NatTransform(X, one, std::move(comps));
}

/// Every component is a bijection.
inline bool is_isomorphism(const NatTransform& n) {
  for (ObjId a = 0; a < n.components().size(); ++a) {
    if (n.source().size(a) != n.target().size(a)) return false;
    Bitset hit(n.target().size(a));
    for (auto y : n.component(a)) hit.set(y);
    if (!hit.all()) return false;
  }
  return true;
}

inline std::string subobject_label(const Subobject& K) {
  const auto& C = K.ambient.base();
  std::vector<std::string> parts;
  for (ObjId a = 0; a < C.num_objects(); ++a)
    parts.push_back(C.object(a) + ":" + set_label(K.parts[a], K.ambient.labels(a)));
  return "[" + join(parts, ";") + "]";
}

}  // namespace toposlang::topos
