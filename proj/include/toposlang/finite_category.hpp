#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "toposlang/common.hpp"
#include "toposlang/heyting.hpp"
#include "toposlang/poset.hpp"

namespace toposlang::cat {

using ObjId = std::size_t;
using MorId = std::size_t;

inline constexpr std::size_t kDefaultSieveCap = std::size_t{1} << 20;

struct Morphism {
  std::string name;
  ObjId dom;
  ObjId cod;
};

/// A small category given by explicit tables. compose(f, g) is f∘g and is
/// defined when cod(g) == dom(f). The constructor only checks that the tables
/// are well-indexed; the category laws are checked by validate_category so
/// that broken tables can still be inspected.
class FiniteCategory {
 public:
  struct Composite {
    MorId f, g, fg;
  };

  FiniteCategory(std::vector<std::string> objects, std::vector<Morphism> morphisms, std::vector<MorId> identities,
                 const std::vector<Composite>& composites)
      : objects_(std::move(objects)), morphisms_(std::move(morphisms)), identities_(std::move(identities)) {
    for (std::size_t i = 0; i < objects_.size(); ++i)
      if (!object_index_.emplace(objects_[i], i).second)
        throw InvalidStructureError("duplicate object '" + objects_[i] + "'");
    for (std::size_t i = 0; i < morphisms_.size(); ++i) {
      const auto& m = morphisms_[i];
      if (m.dom >= objects_.size() || m.cod >= objects_.size())
        throw InvalidStructureError("morphism '" + m.name + "' has an unknown endpoint");
      if (!morphism_index_.emplace(m.name, i).second)
        throw InvalidStructureError("duplicate morphism '" + m.name + "'");
    }
    if (identities_.size() != objects_.size()) throw InvalidStructureError("one identity per object is required");
    for (std::size_t a = 0; a < objects_.size(); ++a) {
      const MorId id = identities_[a];
      if (id >= morphisms_.size() || morphisms_[id].dom != a || morphisms_[id].cod != a)
        throw InvalidStructureError("identity of '" + objects_[a] + "' is not an endomorphism of it");
    }
    const std::size_t m = morphisms_.size();
    table_.assign(m * m, std::nullopt);
    for (const auto& c : composites) {
      if (c.f >= m || c.g >= m || c.fg >= m) throw InvalidStructureError("composition entry out of range");
      auto& slot = table_[c.f * m + c.g];
      if (slot) throw InvalidStructureError("duplicate composition entry for (" + name(c.f) + ", " + name(c.g) + ")");
      slot = c.fg;
    }
  }

  /// One morphism per related pair; composites follow transitivity.
  static FiniteCategory from_poset(const Poset& P) {
    std::vector<Morphism> ms;
    std::vector<MorId> ids(P.size());
    std::map<std::pair<std::size_t, std::size_t>, MorId> arrow;
    for (std::size_t p = 0; p < P.size(); ++p)
      for (std::size_t q = 0; q < P.size(); ++q)
        if (P.leq(p, q)) {
          const MorId id = ms.size();
          arrow[{p, q}] = id;
          if (p == q) {
            ids[p] = id;
            ms.push_back({"id_" + P.element(p), p, p});
          } else {
            ms.push_back({"i_" + P.element(p) + "_" + P.element(q), p, q});
          }
        }
    std::vector<Composite> comps;
    // i_qr ∘ i_pq = i_pr
    for (const auto& [pq, g] : arrow)
      for (std::size_t r = 0; r < P.size(); ++r)
        if (P.leq(pq.second, r)) comps.push_back({arrow.at({pq.second, r}), g, arrow.at({pq.first, r})});
    return FiniteCategory(P.elements(), std::move(ms), std::move(ids), comps);
  }

  /// The one-object, one-morphism category. Presheaves on it are sets.
  static FiniteCategory point() { return FiniteCategory({"pt"}, {{"id_pt", 0, 0}}, {0}, {{0, 0, 0}}); }

  std::size_t num_objects() const { return objects_.size(); }
  std::size_t num_morphisms() const { return morphisms_.size(); }
  const std::vector<std::string>& objects() const { return objects_; }
  const std::string& object(ObjId a) const { return objects_.at(a); }
  const Morphism& morphism(MorId f) const { return morphisms_.at(f); }
  const std::vector<Morphism>& morphisms() const { return morphisms_; }
  const std::string& name(MorId f) const { return morphisms_.at(f).name; }
  ObjId dom(MorId f) const { return morphisms_.at(f).dom; }
  ObjId cod(MorId f) const { return morphisms_.at(f).cod; }
  MorId identity(ObjId a) const { return identities_.at(a); }
  bool is_identity(MorId f) const { return identities_.at(dom(f)) == f; }

  ObjId object_index(const std::string& n) const {
    auto it = object_index_.find(n);
    if (it == object_index_.end()) throw UnknownElementError("unknown object '" + n + "'");
    return it->second;
  }
  MorId morphism_index(const std::string& n) const {
    auto it = morphism_index_.find(n);
    if (it == morphism_index_.end()) throw UnknownElementError("unknown morphism '" + n + "'");
    return it->second;
  }

  /// f∘g if the table has it.
  std::optional<MorId> try_compose(MorId f, MorId g) const {
    if (f >= num_morphisms() || g >= num_morphisms()) return std::nullopt;
    return table_[f * num_morphisms() + g];
  }
  MorId compose(MorId f, MorId g) const {
    if (cod(g) != dom(f)) throw InvalidStructureError("cannot compose " + name(f) + " after " + name(g));
    auto fg = try_compose(f, g);
    if (!fg) throw InvalidStructureError("composition table has no entry for " + name(f) + " ∘ " + name(g));
    return *fg;
  }

  /// Morphisms with codomain a, ascending by id.
  std::vector<MorId> into(ObjId a) const {
    std::vector<MorId> out;
    for (MorId f = 0; f < num_morphisms(); ++f)
      if (cod(f) == a) out.push_back(f);
    return out;
  }
  std::vector<MorId> hom(ObjId b, ObjId a) const {
    std::vector<MorId> out;
    for (MorId f = 0; f < num_morphisms(); ++f)
      if (dom(f) == b && cod(f) == a) out.push_back(f);
    return out;
  }

  bool operator==(const FiniteCategory& o) const {
    if (objects_ != o.objects_ || identities_ != o.identities_ || table_ != o.table_) return false;
    if (morphisms_.size() != o.morphisms_.size()) return false;
    for (std::size_t i = 0; i < morphisms_.size(); ++i)
      if (morphisms_[i].name != o.morphisms_[i].name || morphisms_[i].dom != o.morphisms_[i].dom ||
          morphisms_[i].cod != o.morphisms_[i].cod)
        return false;
    return true;
  }

 private:
  std::vector<std::string> objects_;
  std::vector<Morphism> morphisms_;
  std::vector<MorId> identities_;
  std::vector<std::optional<MorId>> table_;
  std::map<std::string, ObjId> object_index_;
  std::map<std::string, MorId> morphism_index_;
};

struct CategoryViolation {
  std::string kind;  // closure | dom_cod | unit | associativity
  std::string detail;
};

struct CategoryReport {
  std::vector<CategoryViolation> violations;
  bool ok() const { return violations.empty(); }
  bool has(const std::string& kind) const {
    for (const auto& v : violations)
      if (v.kind == kind) return true;
    return false;
  }
};

/// Exhaustive closure, typing, unit and associativity check.
inline CategoryReport validate_category(const FiniteCategory& C) {
  CategoryReport r;
  const std::size_t m = C.num_morphisms();
  for (MorId f = 0; f < m; ++f)
    for (MorId g = 0; g < m; ++g) {
      auto fg = C.try_compose(f, g);
      const bool composable = C.cod(g) == C.dom(f);
      if (composable && !fg) {
        r.violations.push_back({"closure", "missing composite " + C.name(f) + " ∘ " + C.name(g)});
      } else if (!composable && fg) {
        r.violations.push_back({"dom_cod", "entry for non-composable pair " + C.name(f) + " ∘ " + C.name(g)});
      } else if (fg && (C.dom(*fg) != C.dom(g) || C.cod(*fg) != C.cod(f))) {
        r.violations.push_back({"dom_cod", C.name(f) + " ∘ " + C.name(g) + " = " + C.name(*fg) +
                                               " has the wrong domain or codomain"});
      }
    }
  for (MorId f = 0; f < m; ++f) {
    if (C.try_compose(f, C.identity(C.dom(f))) != f)
      r.violations.push_back({"unit", C.name(f) + " ∘ id != " + C.name(f)});
    if (C.try_compose(C.identity(C.cod(f)), f) != f)
      r.violations.push_back({"unit", "id ∘ " + C.name(f) + " != " + C.name(f)});
  }
  for (MorId f = 0; f < m; ++f)
    for (MorId g = 0; g < m; ++g) {
      auto fg = C.try_compose(f, g);
      if (!fg) continue;
      for (MorId h = 0; h < m; ++h) {
        auto gh = C.try_compose(g, h);
        if (!gh) continue;
        auto left = C.try_compose(*fg, h);
        auto right = C.try_compose(f, *gh);
        if (left != right)
          r.violations.push_back({"associativity", "(" + C.name(f) + " ∘ " + C.name(g) + ") ∘ " + C.name(h) +
                                                       " != " + C.name(f) + " ∘ (" + C.name(g) + " ∘ " +
                                                       C.name(h) + ")"});
      }
    }
  return r;
}

/// A set of morphisms into `target`, closed under precomposition. Members are
/// indexed by global morphism id.
struct Sieve {
  ObjId target;
  Bitset members;
  bool operator==(const Sieve&) const = default;
};

inline std::string sieve_label(const FiniteCategory& C, const Sieve& S) {
  std::vector<std::string> names;
  for (const auto& m : C.morphisms()) names.push_back(m.name);
  return set_label(S.members, names);
}

inline bool is_sieve(const FiniteCategory& C, const Sieve& S) {
  if (S.target >= C.num_objects() || S.members.size() != C.num_morphisms()) return false;
  for (auto f : bitset_members(S.members)) {
    if (C.cod(f) != S.target) return false;
    for (MorId g = 0; g < C.num_morphisms(); ++g) {
      if (C.cod(g) != C.dom(f)) continue;
      if (!S.members.test(C.compose(f, g))) return false;
    }
  }
  return true;
}

/// ↓B: every morphism with codomain B.
inline Sieve principal_sieve(const FiniteCategory& C, ObjId b) {
  Sieve s{b, Bitset(C.num_morphisms())};
  for (auto f : C.into(b)) s.members.set(f);
  return s;
}

inline Sieve empty_sieve(const FiniteCategory& C, ObjId a) { return Sieve{a, Bitset(C.num_morphisms())}; }

/// Every sieve on `a`, in numeric order of the member bitmask.
inline std::vector<Sieve> sieves_on(const FiniteCategory& C, ObjId a, std::size_t cap = kDefaultSieveCap) {
  const auto ms = C.into(a);
  std::map<MorId, std::size_t> local;
  for (std::size_t i = 0; i < ms.size(); ++i) local[ms[i]] = i;
  std::vector<Bitset> down(ms.size(), Bitset(ms.size()));
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (MorId g = 0; g < C.num_morphisms(); ++g)
      if (C.cod(g) == C.dom(ms[i])) down[i].set(local.at(C.compose(ms[i], g)));
  std::vector<Sieve> out;
  for (const auto& sub : enumerate_closed_subsets(down, cap)) {
    Sieve s = empty_sieve(C, a);
    for (auto i : bitset_members(sub)) s.members.set(ms[i]);
    out.push_back(std::move(s));
  }
  return out;
}

/// f*(S) = {h : f∘h ∈ S} for f: B -> A and S a sieve on A.
inline Sieve pullback_sieve(const FiniteCategory& C, MorId f, const Sieve& S) {
  if (S.target != C.cod(f))
    throw InvalidStructureError("sieve on '" + C.object(S.target) + "' cannot be pulled back along " + C.name(f));
  if (!is_sieve(C, S)) throw InvalidStructureError(sieve_label(C, S) + " is not a sieve");
  Sieve out = empty_sieve(C, C.dom(f));
  for (auto h : C.into(C.dom(f)))
    if (S.members.test(C.compose(f, h))) out.members.set(h);
  return out;
}

/// S1 ⇒ S2 = {f : for all g, f∘g ∈ S1 implies f∘g ∈ S2}, evaluated directly.
inline Sieve sieve_implies(const FiniteCategory& C, const Sieve& s1, const Sieve& s2) {
  if (s1.target != s2.target) throw InvalidStructureError("sieves on different objects");
  Sieve out = empty_sieve(C, s1.target);
  for (auto f : C.into(s1.target)) {
    bool ok = true;
    for (auto g : C.into(C.dom(f))) {
      const MorId fg = C.compose(f, g);
      if (s1.members.test(fg) && !s2.members.test(fg)) {
        ok = false;
        break;
      }
    }
    if (ok) out.members.set(f);
  }
  return out;
}

/// ¬S = {f : for all g, f∘g ∉ S}.
inline Sieve sieve_negate(const FiniteCategory& C, const Sieve& s) {
  Sieve out = empty_sieve(C, s.target);
  for (auto f : C.into(s.target)) {
    bool ok = true;
    for (auto g : C.into(C.dom(f)))
      if (s.members.test(C.compose(f, g))) {
        ok = false;
        break;
      }
    if (ok) out.members.set(f);
  }
  return out;
}

/// Ω_A as a Heyting algebra: sieves on A under inclusion. Element ids match the
/// order of sieves_on(C, A).
class SieveAlgebra : public heyting::SetAlgebra {
 public:
  SieveAlgebra(const FiniteCategory& C, ObjId a, std::size_t size_cap = heyting::kDefaultSizeCap)
      : heyting::SetAlgebra(morphism_names(C), sets_of(sieves_on(C, a, size_cap)), {}, size_cap),
        target_(a) {}

  ObjId target() const { return target_; }
  Sieve sieve(heyting::ElemId e) const { return Sieve{target_, set(e)}; }
  heyting::ElemId index_of_sieve(const Sieve& s) const { return index_of(s.members); }

 private:
  static std::vector<std::string> morphism_names(const FiniteCategory& C) {
    std::vector<std::string> names;
    for (const auto& m : C.morphisms()) names.push_back(m.name);
    return names;
  }
  static std::vector<Bitset> sets_of(const std::vector<Sieve>& ss) {
    std::vector<Bitset> out;
    for (const auto& s : ss) out.push_back(s.members);
    return out;
  }

  ObjId target_;
};

inline SieveAlgebra sieve_heyting(const FiniteCategory& C, ObjId a,
                                  std::size_t size_cap = heyting::kDefaultSizeCap) {
  return SieveAlgebra(C, a, size_cap);
}

}  // namespace toposlang::cat
