#pragma once

#include <concepts>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "toposlang/common.hpp"
#include "toposlang/poset.hpp"

namespace toposlang::heyting {

using ElemId = std::size_t;

inline constexpr std::size_t kDefaultSizeCap = 4096;

/// Anything with the operations of a Heyting algebra over `element_type`.
/// Satisfied by the tabled HeytingAlgebra (interned ids) and by
/// PowersetAlgebra (bitsets, no tables).
template <class H>
concept HeytingStructure = requires(const H& h, const typename H::element_type& a) {
  typename H::element_type;
  { h.top() } -> std::convertible_to<typename H::element_type>;
  { h.bottom() } -> std::convertible_to<typename H::element_type>;
  { h.meet(a, a) } -> std::convertible_to<typename H::element_type>;
  { h.join(a, a) } -> std::convertible_to<typename H::element_type>;
  { h.implies(a, a) } -> std::convertible_to<typename H::element_type>;
  { h.negate(a) } -> std::convertible_to<typename H::element_type>;
  { h.leq(a, a) } -> std::convertible_to<bool>;
};

/// Finite bounded lattice with interned element ids. Meet and join tables are
/// derived from the order at construction, so they are the glb/lub by
/// definition; construction fails if some pair has no glb or lub.
class BoundedLattice {
 public:
  using element_type = ElemId;

  BoundedLattice() = default;

  /// `leq[a]` holds every b with a <= b.
  BoundedLattice(std::vector<std::string> labels, std::vector<Bitset> leq, std::size_t size_cap = kDefaultSizeCap)
      : BoundedLattice(std::move(labels), std::move(leq), size_cap, nullptr, nullptr) {}

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(ElemId a) const {
    check(a);
    return labels_[a];
  }

  ElemId find(const std::string& label) const {
    auto it = by_label_.find(label);
    if (it == by_label_.end()) throw UnknownElementError("unknown lattice element '" + label + "'");
    return it->second;
  }
  std::optional<ElemId> try_find(const std::string& label) const {
    auto it = by_label_.find(label);
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
  }

  ElemId bottom() const { return bottom_; }
  ElemId top() const { return top_; }

  bool leq(ElemId a, ElemId b) const {
    check(a);
    check(b);
    return leq_[a].test(b);
  }
  ElemId meet(ElemId a, ElemId b) const {
    check(a);
    check(b);
    return meet_[a * size() + b];
  }
  ElemId join(ElemId a, ElemId b) const {
    check(a);
    check(b);
    return join_[a * size() + b];
  }

 protected:
  using Combine = std::function<std::optional<ElemId>(ElemId, ElemId)>;

  /// `fast_meet`/`fast_join` may propose a candidate (checked against the
  /// order) before the generic scan runs.
  BoundedLattice(std::vector<std::string> labels, std::vector<Bitset> leq, std::size_t size_cap,
                 const Combine& fast_meet, const Combine& fast_join)
      : labels_(std::move(labels)), leq_(std::move(leq)) {
    const std::size_t n = labels_.size();
    if (n == 0) throw InvalidStructureError("a bounded lattice needs at least one element");
    if (n > size_cap)
      throw CapExceededError("carrier of " + std::to_string(n) + " elements exceeds size cap " +
                             std::to_string(size_cap));
    if (leq_.size() != n) throw InvalidStructureError("order relation has the wrong number of rows");
    for (std::size_t i = 0; i < n; ++i) {
      if (leq_[i].size() != n) throw InvalidStructureError("order relation row has the wrong width");
      if (!by_label_.emplace(labels_[i], i).second)
        throw InvalidStructureError("duplicate lattice element '" + labels_[i] + "'");
    }
    // geq_[b] = {a : a <= b}
    geq_.assign(n, Bitset(n));
    for (std::size_t a = 0; a < n; ++a)
      for (auto b : bitset_members(leq_[a])) geq_[b].set(a);

    bool found_bottom = false, found_top = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (leq_[i].all()) {
        bottom_ = i;
        found_bottom = true;
      }
      if (geq_[i].all()) {
        top_ = i;
        found_top = true;
      }
    }
    if (!found_bottom || !found_top) throw InvalidStructureError("order has no bottom or no top element");

    meet_.resize(n * n);
    join_.resize(n * n);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        const auto m = bound(a, b, true, fast_meet);
        const auto j = bound(a, b, false, fast_join);
        meet_[a * n + b] = meet_[b * n + a] = static_cast<std::uint32_t>(m);
        join_[a * n + b] = join_[b * n + a] = static_cast<std::uint32_t>(j);
      }
    }
  }

  void check(ElemId a) const {
    if (a >= labels_.size())
      throw UnknownElementError("element id " + std::to_string(a) + " is not in the carrier");
  }

 private:
  // glb (lower=true) or lub of a, b.
  ElemId bound(ElemId a, ElemId b, bool lower, const Combine& fast) const {
    const Bitset common = lower ? (geq_[a] & geq_[b]) : (leq_[a] & leq_[b]);
    if (fast) {
      if (auto c = fast(a, b); c && common.test(*c)) {
        const Bitset& dominated = lower ? geq_[*c] : leq_[*c];
        if (common.is_subset_of(dominated)) return *c;
      }
    }
    for (auto c : bitset_members(common)) {
      const Bitset& dominated = lower ? geq_[c] : leq_[c];
      if (common.is_subset_of(dominated)) return c;
    }
    throw InvalidStructureError(std::string("elements '") + labels_[a] + "' and '" + labels_[b] + "' have no " +
                                (lower ? "greatest lower bound" : "least upper bound"));
  }

  std::vector<std::string> labels_;
  std::map<std::string, ElemId> by_label_;
  std::vector<Bitset> leq_, geq_;
  std::vector<std::uint32_t> meet_, join_;
  ElemId bottom_ = 0, top_ = 0;
};

/// A finite Heyting algebra: a bounded lattice whose relative pseudo-complement
/// a => b = max{g : g & a <= b} exists for every pair. The implication table is
/// filled by scanning the carrier for carriers up to `kEagerImplicationLimit`;
/// larger algebras scan per query.
class HeytingAlgebra : public BoundedLattice {
 public:
  static constexpr std::size_t kEagerImplicationLimit = 512;

  HeytingAlgebra() = default;

  HeytingAlgebra(std::vector<std::string> labels, std::vector<Bitset> leq, std::size_t size_cap = kDefaultSizeCap)
      : BoundedLattice(std::move(labels), std::move(leq), size_cap) {
    build_implication();
  }

  ElemId implies(ElemId a, ElemId b) const {
    check(a);
    check(b);
    if (!implies_.empty()) return implies_[a * size() + b];
    return scan_implies(a, b);
  }

  ElemId negate(ElemId a) const { return implies(a, bottom()); }

  /// Largest g with g & a <= b, recomputed by scanning the carrier. Exposed so
  /// closed-form implications can be compared against it.
  ElemId scan_implies(ElemId a, ElemId b) const {
    std::optional<ElemId> best;
    for (ElemId g = 0; g < size(); ++g) {
      if (!leq(meet(g, a), b)) continue;
      if (!best || leq(*best, g)) {
        best = g;
      } else if (!leq(g, *best)) {
        // incomparable witnesses: take their join and let the final check decide
        best = join(*best, g);
      }
    }
    if (!best || !leq(meet(*best, a), b))
      throw InvalidStructureError("no relative pseudo-complement for '" + label(a) + "' => '" + label(b) +
                                  "'; the lattice is not Heyting");
    for (ElemId g = 0; g < size(); ++g)
      if (leq(meet(g, a), b) && !leq(g, *best))
        throw InvalidStructureError("no relative pseudo-complement for '" + label(a) + "' => '" + label(b) +
                                    "'; the lattice is not Heyting");
    return *best;
  }

 protected:
  HeytingAlgebra(std::vector<std::string> labels, std::vector<Bitset> leq, std::size_t size_cap,
                 const Combine& fast_meet, const Combine& fast_join)
      : BoundedLattice(std::move(labels), std::move(leq), size_cap, fast_meet, fast_join) {
    build_implication();
  }

 private:
  void build_implication() {
    const std::size_t n = size();
    if (n > kEagerImplicationLimit) return;
    implies_.resize(n * n);
    for (ElemId a = 0; a < n; ++a)
      for (ElemId b = 0; b < n; ++b) implies_[a * n + b] = static_cast<std::uint32_t>(scan_implies(a, b));
  }

  std::vector<std::uint32_t> implies_;
};

/// Heyting algebra of a family of subsets of a finite universe, ordered by
/// inclusion. Element ids follow the numeric bitset order of the sets.
class SetAlgebra : public HeytingAlgebra {
 public:
  SetAlgebra() = default;

  /// `labels` may be empty, in which case "{a,b}" labels are generated from
  /// `points`.
  SetAlgebra(std::vector<std::string> points, std::vector<Bitset> sets, std::vector<std::string> labels = {},
             std::size_t size_cap = kDefaultSizeCap)
      : SetAlgebra(Prepared::make(std::move(points), std::move(sets), std::move(labels), size_cap), size_cap) {}

  const std::vector<std::string>& points() const { return points_; }
  const Bitset& set(ElemId a) const {
    check(a);
    return sets_[a];
  }
  const std::vector<Bitset>& sets() const { return sets_; }

  ElemId index_of(const Bitset& s) const {
    auto it = index_.find(key(s));
    if (it == index_.end()) throw UnknownElementError("set " + set_label(s, points_) + " is not in the algebra");
    return it->second;
  }
  std::optional<ElemId> try_index_of(const Bitset& s) const {
    auto it = index_.find(key(s));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  struct Prepared {
    std::vector<std::string> points;
    std::vector<Bitset> sets;
    std::vector<std::string> labels;
    std::vector<Bitset> leq;
    std::unordered_map<std::string, ElemId> index;

    static Prepared make(std::vector<std::string> points, std::vector<Bitset> sets, std::vector<std::string> labels,
                         std::size_t size_cap) {
      if (sets.size() > size_cap)
        throw CapExceededError("carrier of " + std::to_string(sets.size()) + " elements exceeds size cap " +
                               std::to_string(size_cap));
      Prepared p;
      p.points = std::move(points);
      for (auto& s : sets) {
        if (s.size() != p.points.size()) throw InvalidStructureError("set width does not match the universe");
      }
      std::vector<std::size_t> order(sets.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return bitset_numeric_less(sets[a], sets[b]); });
      for (auto i : order) {
        if (!p.sets.empty() && p.sets.back() == sets[i]) continue;
        p.sets.push_back(sets[i]);
        p.labels.push_back(labels.empty() ? set_label(sets[i], p.points) : labels[i]);
      }
      const std::size_t n = p.sets.size();
      p.leq.assign(n, Bitset(n));
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
          if (p.sets[a].is_subset_of(p.sets[b])) p.leq[a].set(b);
      for (std::size_t i = 0; i < n; ++i) p.index.emplace(key(p.sets[i]), i);
      return p;
    }
  };

  static std::string key(const Bitset& s) {
    std::string k;
    boost::to_string(s, k);
    return k;
  }

  SetAlgebra(Prepared p, std::size_t size_cap)
      : HeytingAlgebra(
            p.labels, p.leq, size_cap,
            [&p](ElemId a, ElemId b) -> std::optional<ElemId> {
              auto it = p.index.find(key(p.sets[a] & p.sets[b]));
              if (it == p.index.end()) return std::nullopt;
              return it->second;
            },
            [&p](ElemId a, ElemId b) -> std::optional<ElemId> {
              auto it = p.index.find(key(p.sets[a] | p.sets[b]));
              if (it == p.index.end()) return std::nullopt;
              return it->second;
            }),
        points_(std::move(p.points)),
        sets_(std::move(p.sets)),
        index_(std::move(p.index)) {}

  std::vector<std::string> points_;
  std::vector<Bitset> sets_;
  std::unordered_map<std::string, ElemId> index_;
};

/// Boolean algebra of all subsets of n points, computed on bitsets without
/// tables. Used where the powerset is too large to intern.
class PowersetAlgebra {
 public:
  using element_type = Bitset;

  explicit PowersetAlgebra(std::vector<std::string> points) : points_(std::move(points)) {}

  std::size_t width() const { return points_.size(); }
  const std::vector<std::string>& points() const { return points_; }
  Bitset top() const { return Bitset(width()).set(); }
  Bitset bottom() const { return Bitset(width()); }
  Bitset meet(const Bitset& a, const Bitset& b) const { return a & b; }
  Bitset join(const Bitset& a, const Bitset& b) const { return a | b; }
  Bitset implies(const Bitset& a, const Bitset& b) const { return ~a | b; }
  Bitset negate(const Bitset& a) const { return ~a; }
  bool leq(const Bitset& a, const Bitset& b) const { return a.is_subset_of(b); }
  std::string label(const Bitset& a) const { return set_label(a, points_); }

 private:
  std::vector<std::string> points_;
};

static_assert(HeytingStructure<HeytingAlgebra>);
static_assert(HeytingStructure<PowersetAlgebra>);

enum class LatticeOp { Meet, Join, Leq };

/// Table lookup: an element for meet/join, a boolean for leq.
inline std::variant<ElemId, bool> lattice_op(LatticeOp kind, const BoundedLattice& lattice, ElemId a, ElemId b) {
  switch (kind) {
    case LatticeOp::Meet: return lattice.meet(a, b);
    case LatticeOp::Join: return lattice.join(a, b);
    case LatticeOp::Leq: return lattice.leq(a, b);
  }
  throw Error("internal", "unreachable lattice op");
}

// --- builders -------------------------------------------------------------

inline SetAlgebra powerset_algebra(std::vector<std::string> base, std::size_t size_cap = kDefaultSizeCap) {
  const std::size_t n = base.size();
  if (n >= 63 || (std::size_t{1} << n) > size_cap)
    throw CapExceededError("powerset of " + std::to_string(n) + " points exceeds size cap " +
                           std::to_string(size_cap));
  std::vector<Bitset> sets;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) sets.emplace_back(n, mask);
  return SetAlgebra(std::move(base), std::move(sets), {}, size_cap);
}

/// Opens of a finite topology. The family must contain the empty set and the
/// whole space and be closed under pairwise intersection and union (which is
/// arbitrary union in the finite case).
inline SetAlgebra open_set_algebra(std::vector<std::string> points, const std::vector<std::vector<std::string>>& opens,
                                   std::size_t size_cap = kDefaultSizeCap) {
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!idx.emplace(points[i], i).second) throw InvalidStructureError("duplicate point '" + points[i] + "'");
  std::vector<Bitset> sets;
  for (const auto& open : opens) {
    Bitset s(points.size());
    for (const auto& p : open) {
      auto it = idx.find(p);
      if (it == idx.end()) throw UnknownElementError("open set mentions unknown point '" + p + "'");
      s.set(it->second);
    }
    sets.push_back(s);
  }
  auto contains = [&](const Bitset& s) { return std::find(sets.begin(), sets.end(), s) != sets.end(); };
  if (!contains(Bitset(points.size()))) throw InvalidStructureError("topology does not contain the empty set");
  if (!contains(Bitset(points.size()).set())) throw InvalidStructureError("topology does not contain the whole space");
  for (const auto& a : sets)
    for (const auto& b : sets) {
      if (!contains(a & b))
        throw InvalidStructureError("topology not closed under intersection: " + set_label(a, points) + " & " +
                                    set_label(b, points));
      if (!contains(a | b))
        throw InvalidStructureError("topology not closed under union: " + set_label(a, points) + " | " +
                                    set_label(b, points));
    }
  return SetAlgebra(std::move(points), std::move(sets), {}, size_cap);
}

inline SetAlgebra lower_set_algebra(const Poset& poset, std::size_t size_cap = kDefaultSizeCap) {
  return SetAlgebra(poset.elements(), poset.lower_sets(size_cap), {}, size_cap);
}

// --- law checking -----------------------------------------------------------

struct Violation {
  std::string law;
  std::vector<std::string> elements;
};

struct LawReport {
  bool exhaustive = true;
  std::uint64_t checks = 0;
  std::uint64_t violation_count = 0;
  std::vector<Violation> violations;  // at most LawCheckOptions::max_listed

  bool ok() const { return violation_count == 0; }
  bool has(const std::string& law) const {
    return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.law == law; });
  }
};

struct LawCheckOptions {
  std::size_t exhaustive_limit = 64;  // carriers above this are sampled
  std::uint64_t samples = 200000;
  std::uint64_t seed = 1;
  std::size_t max_listed = 1000;
};

namespace detail {

template <class Lattice, class TripleCheck>
LawReport run_triples(const Lattice& L, const LawCheckOptions& opt, TripleCheck&& check) {
  LawReport r;
  auto record = [&](std::string law, std::initializer_list<ElemId> xs) {
    ++r.violation_count;
    if (r.violations.size() < opt.max_listed) {
      Violation v{std::move(law), {}};
      for (auto x : xs) v.elements.push_back(L.label(x));
      r.violations.push_back(std::move(v));
    }
  };
  const std::size_t n = L.size();
  if (n <= opt.exhaustive_limit) {
    for (ElemId a = 0; a < n; ++a)
      for (ElemId b = 0; b < n; ++b)
        for (ElemId c = 0; c < n; ++c) {
          ++r.checks;
          check(a, b, c, record);
        }
  } else {
    r.exhaustive = false;
    std::mt19937_64 rng(opt.seed);
    std::uniform_int_distribution<ElemId> pick(0, n - 1);
    for (std::uint64_t i = 0; i < opt.samples; ++i) {
      ++r.checks;
      check(pick(rng), pick(rng), pick(rng), record);
    }
  }
  return r;
}

template <class Record>
void lattice_triple(const BoundedLattice& L, ElemId a, ElemId b, ElemId c, Record& record) {
  // order axioms
  if (a == b && !L.leq(a, a)) record("reflexivity", {a});
  if (a != b && L.leq(a, b) && L.leq(b, a)) record("antisymmetry", {a, b});
  if (L.leq(a, b) && L.leq(b, c) && !L.leq(a, c)) record("transitivity", {a, b, c});
  if (c == 0) {
    if (!L.leq(L.bottom(), a) || !L.leq(a, L.top())) record("bounds", {a});
    const ElemId m = L.meet(a, b), j = L.join(a, b);
    if (!L.leq(m, a) || !L.leq(m, b)) record("meet_lower_bound", {a, b});
    if (!L.leq(a, j) || !L.leq(b, j)) record("join_upper_bound", {a, b});
    if (m != L.meet(b, a)) record("meet_commutativity", {a, b});
    if (j != L.join(b, a)) record("join_commutativity", {a, b});
    if (L.meet(a, L.join(a, b)) != a || L.join(a, L.meet(a, b)) != a) record("absorption", {a, b});
  }
  if (L.leq(c, a) && L.leq(c, b) && !L.leq(c, L.meet(a, b))) record("meet_greatest", {a, b, c});
  if (L.leq(a, c) && L.leq(b, c) && !L.leq(L.join(a, b), c)) record("join_least", {a, b, c});
  if (L.meet(L.meet(a, b), c) != L.meet(a, L.meet(b, c))) record("meet_associativity", {a, b, c});
  if (L.join(L.join(a, b), c) != L.join(a, L.join(b, c))) record("join_associativity", {a, b, c});
  if (L.meet(a, L.join(b, c)) != L.join(L.meet(a, b), L.meet(a, c))) record("distributivity", {a, b, c});
}

}  // namespace detail

/// Lattice axioms plus distributivity. Every violating pair/triple is counted;
/// the first `max_listed` are reported.
inline LawReport check_lattice_laws(const BoundedLattice& L, const LawCheckOptions& opt = {}) {
  return detail::run_triples(L, opt, [&](ElemId a, ElemId b, ElemId c, auto& record) {
    detail::lattice_triple(L, a, b, c, record);
  });
}

/// Lattice laws, distributivity, the adjunction g <= (a => b) iff g & a <= b,
/// and a <= ~~a.
inline LawReport check_heyting_laws(const HeytingAlgebra& H, const LawCheckOptions& opt = {}) {
  return detail::run_triples(H, opt, [&](ElemId g, ElemId a, ElemId b, auto& record) {
    detail::lattice_triple(H, g, a, b, record);
    if (H.leq(g, H.implies(a, b)) != H.leq(H.meet(g, a), b)) record("adjunction", {g, a, b});
    if (a == 0 && b == 0 && !H.leq(g, H.negate(H.negate(g)))) record("double_negation_intro", {g});
  });
}

/// Every a with a | ~a != top; empty exactly when the algebra is Boolean.
inline std::vector<ElemId> excluded_middle_failures(const HeytingAlgebra& H) {
  std::vector<ElemId> out;
  for (ElemId a = 0; a < H.size(); ++a)
    if (H.join(a, H.negate(a)) != H.top()) out.push_back(a);
  return out;
}

}  // namespace toposlang::heyting
