#pragma once
// Shared fixtures: small categories and presheaves over them.

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "toposlang/topos.hpp"

namespace fixtures {

using namespace toposlang;
using cat::FiniteCategory;
using cat::ObjId;
using topos::CategoryPtr;
using topos::Presheaf;

inline CategoryPtr share(FiniteCategory C) { return std::make_shared<const FiniteCategory>(std::move(C)); }

inline CategoryPtr point() { return share(FiniteCategory::point()); }
inline CategoryPtr two_point() { return share(FiniteCategory::from_poset(Poset({"p", "q"}, {{"p", "q"}}))); }
inline CategoryPtr chain3() { return share(FiniteCategory::from_poset(Poset({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}))); }
inline CategoryPtr vee() {  // b <= a, c <= a
  return share(FiniteCategory::from_poset(Poset({"a", "b", "c"}, {{"b", "a"}, {"c", "a"}})));
}
inline CategoryPtr diamond() {  // bot <= l, r <= top
  return share(FiniteCategory::from_poset(
      Poset({"bot", "l", "r", "top"}, {{"bot", "l"}, {"bot", "r"}, {"l", "top"}, {"r", "top"}})));
}
/// One object with an idempotent e (e∘e = e).
inline CategoryPtr idempotent() {
  return share(FiniteCategory({"o"}, {{"id", 0, 0}, {"e", 0, 0}}, {0}, {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}}));
}
/// Two objects with a parallel pair s, t: a -> b.
inline CategoryPtr parallel() {
  return share(FiniteCategory({"a", "b"}, {{"id_a", 0, 0}, {"id_b", 1, 1}, {"s", 0, 1}, {"t", 0, 1}}, {0, 1},
                              {{0, 0, 0}, {1, 1, 1}, {2, 0, 2}, {3, 0, 3}, {1, 2, 2}, {1, 3, 3}}));
}

inline std::vector<CategoryPtr> all_categories() {
  return {point(), two_point(), chain3(), vee(), diamond(), idempotent(), parallel()};
}

/// A random sub-presheaf of a small sum of representables (and 1), with
/// stages of at most `max_size` elements. Functor laws hold by construction.
inline Presheaf random_presheaf(const CategoryPtr& C, std::mt19937& rng, std::size_t max_size = 3) {
  topos::Topos T(C);
  std::uniform_int_distribution<int> coin(0, 1);
  Presheaf X = topos::representable(C, std::uniform_int_distribution<ObjId>(0, C->num_objects() - 1)(rng));
  if (coin(rng)) X = T.coproduct(X, topos::representable(C, std::uniform_int_distribution<ObjId>(0, C->num_objects() - 1)(rng)));
  if (coin(rng)) X = T.coproduct(X, T.terminal());
  auto subs = T.subobjects(X);
  // keep sub-presheaves whose stages stay within the size bound
  std::vector<topos::Subobject> ok;
  for (const auto& K : subs) {
    bool small = true, nonempty = false;
    for (ObjId a = 0; a < C->num_objects(); ++a) {
      small = small && K.parts[a].count() <= max_size;
      nonempty = nonempty || K.parts[a].any();
    }
    if (small && nonempty) ok.push_back(K);
  }
  if (ok.empty()) return T.terminal();
  return topos::subpresheaf(ok[std::uniform_int_distribution<std::size_t>(0, ok.size() - 1)(rng)]);
}

/// Deterministic fixture list: the classifier kit, representables, products,
/// coproducts and random sub-presheaves over every fixture category.
inline std::vector<Presheaf> presheaf_fixtures(const CategoryPtr& C, unsigned seed = 1) {
  topos::Topos T(C);
  std::vector<Presheaf> out{T.terminal(), T.omega()};
  for (ObjId a = 0; a < C->num_objects(); ++a) out.push_back(topos::representable(C, a));
  out.push_back(T.product({T.omega(), T.omega()}).object);
  out.push_back(T.coproduct(T.terminal(), T.terminal()));
  std::mt19937 rng(seed);
  for (int i = 0; i < 3; ++i) out.push_back(random_presheaf(C, rng));
  return out;
}

}  // namespace fixtures
