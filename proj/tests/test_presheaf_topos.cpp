#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "toposlang/topos.hpp"

using namespace toposlang;
using namespace toposlang::topos;

namespace {

Subobject make_sub(const Presheaf& X, std::vector<std::vector<Elem>> parts) {
  Subobject K{X, {}};
  for (ObjId a = 0; a < parts.size(); ++a) {
    Bitset b(X.size(a));
    for (auto x : parts[a]) b.set(x);
    K.parts.push_back(b);
  }
  return K;
}

// Oracle: every family of subsets, kept if closed under restriction.
std::size_t brute_sub_count(const Presheaf& X) {
  std::size_t n = X.total_size(), count = 0;
  std::vector<std::size_t> offs{0};
  for (ObjId a = 0; a < X.base().num_objects(); ++a) offs.push_back(offs.back() + X.size(a));
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    Subobject K{X, {}};
    for (ObjId a = 0; a < X.base().num_objects(); ++a) {
      Bitset b(X.size(a));
      for (Elem x = 0; x < X.size(a); ++x)
        if (mask >> (offs[a] + x) & 1) b.set(x);
      K.parts.push_back(b);
    }
    if (validate_subobject(K).ok()) ++count;
  }
  return count;
}

// Oracle: every stagewise function, kept if natural.
std::size_t brute_hom_count(const Presheaf& X, const Presheaf& Y) {
  const auto& C = X.base();
  std::vector<std::pair<ObjId, Elem>> nodes;
  for (ObjId a = 0; a < C.num_objects(); ++a)
    for (Elem x = 0; x < X.size(a); ++x) nodes.emplace_back(a, x);
  std::vector<std::vector<Elem>> comps(C.num_objects());
  for (ObjId a = 0; a < C.num_objects(); ++a) comps[a].assign(X.size(a), 0);
  std::size_t count = 0;
  auto rec = [&](std::size_t i, auto&& self) -> void {
    if (i == nodes.size()) {
      if (validate_nat(NatTransform(X, Y, comps)).ok()) ++count;
      return;
    }
    auto [a, x] = nodes[i];
    for (Elem y = 0; y < Y.size(a); ++y) {
      comps[a][x] = y;
      self(i + 1, self);
    }
  };
  rec(0, rec);
  return count;
}

}  // namespace

TEST(PresheafTopos, ValidatorsCatchBrokenFunctors) {
  auto C = fixtures::two_point();
  EXPECT_TRUE(validate_presheaf(constant_presheaf(C, {"x", "y"})).ok());
  // restriction along i_p_q not total: X_q has two elements, map has one
  Presheaf bad(C, {{"a"}, {"b", "c"}}, {{0}, {0}, {0, 1}});
  EXPECT_FALSE(validate_presheaf(bad).ok());
  Presheaf bad_id(C, {{"a", "b"}, {"c"}}, {{1, 0}, {0}, {0}});
  EXPECT_TRUE(validate_presheaf(bad_id).has("identity"));
  Topos T(C);
  EXPECT_TRUE(validate_nat(identity_arrow(T.omega())).ok());
  // Ω -> Ω sending everything to the bottom sieve except ↓q: not natural
  NatTransform n(T.omega(), T.omega(), {{0, 1}, {0, 0, 2}});
  EXPECT_FALSE(validate_nat(n).ok());
}

TEST(PresheafTopos, ClassifierKit) {
  Topos S(FiniteCategory::point());
  EXPECT_EQ(S.omega().size(0), 2u);
  Topos T(fixtures::two_point());
  const auto p = T.base().object_index("p"), q = T.base().object_index("q");
  EXPECT_EQ(T.omega().size(q), 3u);
  EXPECT_EQ(T.omega().size(p), 2u);
  EXPECT_EQ(T.omega().labels(q), (std::vector<std::string>{"{}", "{i_p_q}", "{i_p_q,id_q}"}));
  const auto ipq = T.base().morphism_index("i_p_q");
  EXPECT_EQ(T.omega().label(p, T.omega().restrict(ipq, T.omega().find(q, "{i_p_q}"))), "{id_p}");
  for (ObjId a = 0; a < 2; ++a)
    for (Elem s = 0; s < T.omega().size(a); ++s) EXPECT_EQ(T.omega().restrict(T.base().identity(a), s), s);
  EXPECT_EQ(T.omega().label(q, T.true_arrow().at(q, 0)), "{i_p_q,id_q}");
  for (const auto& C : fixtures::all_categories()) {
    Topos U(C);
    EXPECT_TRUE(validate_presheaf(U.omega()).ok());
    EXPECT_TRUE(validate_presheaf(U.terminal()).ok());
    EXPECT_TRUE(validate_nat(U.true_arrow()).ok());
  }
}

TEST(PresheafTopos, CharacteristicExamples) {
  Topos T(fixtures::two_point());
  const auto& one = T.terminal();
  const ObjId p = 0, q = 1;
  auto K = make_sub(one, {{0}, {}});
  auto chi = T.characteristic(K);
  EXPECT_EQ(T.omega().label(q, chi.at(q, 0)), "{i_p_q}");
  EXPECT_EQ(T.omega().label(p, chi.at(p, 0)), "{id_p}");
  EXPECT_EQ(T.subobject_of(chi), K);
  EXPECT_EQ(T.characteristic(T.whole(one)), T.constant_true(one));
  EXPECT_EQ(T.characteristic(T.empty(one)), T.constant_false(one));
  EXPECT_EQ(T.subobject_of(T.constant_true(T.omega())), T.whole(T.omega()));
  EXPECT_EQ(T.subobject_of(T.constant_false(T.omega())), T.empty(T.omega()));
  EXPECT_THROW(T.characteristic(make_sub(one, {{}, {0}})), InvalidStructureError);
}

TEST(PresheafTopos, SubHeytingOnTerminal) {
  Topos T(fixtures::two_point());
  auto H = sub_heyting(T, T.terminal());
  EXPECT_EQ(H.size(), 3u);
  EXPECT_TRUE(heyting::check_heyting_laws(H).ok());
  const auto k = H.index_of_subobject(make_sub(T.terminal(), {{0}, {}}));
  EXPECT_EQ(H.subobject(H.negate(k)), T.empty(T.terminal()));
  EXPECT_NE(H.join(k, H.negate(k)), H.top());
  Topos S(FiniteCategory::point());
  auto B = sub_heyting(S, S.terminal());
  EXPECT_EQ(B.size(), 2u);
}

TEST(PresheafTopos, SubImplicationMatchesScan) {
  for (const auto& C : fixtures::all_categories()) {
    Topos T(C);
    for (const auto& X : fixtures::presheaf_fixtures(C)) {
      if (X.total_size() > 10) continue;
      auto H = sub_heyting(T, X);
      for (heyting::ElemId a = 0; a < H.size(); ++a)
        for (heyting::ElemId b = 0; b < H.size(); ++b)
          ASSERT_EQ(T.sub_implies(H.subobject(a), H.subobject(b)), H.subobject(H.scan_implies(a, b)));
    }
  }
}

TEST(PresheafTopos, ExcludedMiddleInSetCase) {
  Topos S(FiniteCategory::point());
  auto X = constant_presheaf(S.base_ptr(), {"a", "b", "c"});
  auto H = sub_heyting(S, X);
  EXPECT_EQ(H.size(), 8u);
  for (heyting::ElemId a = 0; a < H.size(); ++a) EXPECT_EQ(H.join(a, H.negate(a)), H.top());
}

TEST(PresheafTopos, ClassifierBijection) {
  for (const auto& C : fixtures::all_categories()) {
    Topos T(C);
    for (const auto& X : fixtures::presheaf_fixtures(C)) {
      if (X.total_size() > 12) continue;
      const auto subs = T.subobjects(X);
      const auto arrows = T.hom(X, T.omega());
      EXPECT_EQ(subs.size(), arrows.size());
      EXPECT_EQ(subs.size(), brute_sub_count(X));
      for (const auto& K : subs) EXPECT_EQ(T.subobject_of(T.characteristic(K)), K);
      for (const auto& chi : arrows) EXPECT_EQ(T.characteristic(T.subobject_of(chi)), chi);
    }
  }
}

TEST(PresheafTopos, HomMatchesBruteForce) {
  for (const auto& C : {fixtures::two_point(), fixtures::idempotent(), fixtures::parallel()}) {
    Topos T(C);
    auto fx = fixtures::presheaf_fixtures(C, 3);
    for (const auto& X : fx)
      for (const auto& Y : fx) {
        if (X.total_size() > 6 || Y.total_size() > 6) continue;
        auto hs = T.hom(X, Y);
        EXPECT_EQ(hs.size(), brute_hom_count(X, Y));
        for (const auto& h : hs) EXPECT_TRUE(validate_nat(h).ok());
        EXPECT_TRUE(std::is_sorted(hs.begin(), hs.end(),
                                   [](const auto& a, const auto& b) { return a.components() < b.components(); }));
      }
  }
}

TEST(PresheafTopos, Products) {
  for (const auto& C : fixtures::all_categories()) {
    Topos T(C);
    auto fx = fixtures::presheaf_fixtures(C);
    const auto& X = fx.back();
    auto P = T.product({X, T.omega()});
    EXPECT_TRUE(validate_presheaf(P.object).ok());
    for (ObjId a = 0; a < C->num_objects(); ++a) EXPECT_EQ(P.object.size(a), X.size(a) * T.omega().size(a));
    for (const auto& pr : P.projections) EXPECT_TRUE(validate_nat(pr).ok());
    // X × 1 ≅ X through the first projection
    auto X1 = T.product({X, T.terminal()});
    EXPECT_TRUE(is_isomorphism(X1.projections[0]));
    // ⟨π1, π2⟩ = id
    EXPECT_EQ(T.pair(P, P.projections), identity_arrow(P.object));
  }
}

TEST(PresheafTopos, ProductUniversalPropertyByExhaustion) {
  Topos T(fixtures::two_point());
  const auto& O = T.omega();
  auto Z = representable(T.base_ptr(), 1);
  auto P = T.product({O, T.terminal()});
  // Hom(Z, O × 1) ≅ Hom(Z, O) × Hom(Z, 1)
  EXPECT_EQ(T.count_hom(Z, P.object), T.count_hom(Z, O) * T.count_hom(Z, T.terminal()));
  for (const auto& f : T.hom(Z, O)) {
    auto pf = T.pair(P, {f, to_terminal(Z, T.terminal())});
    EXPECT_EQ(compose(P.projections[0], pf), f);
  }
}

TEST(PresheafTopos, Coproduct) {
  for (const auto& C : fixtures::all_categories()) {
    Topos T(C);
    auto S = T.coproduct(T.omega(), T.terminal());
    EXPECT_TRUE(validate_presheaf(S).ok());
    // Hom(X + Y, Z) ≅ Hom(X, Z) × Hom(Y, Z)
    EXPECT_EQ(T.count_hom(S, T.omega()), T.count_hom(T.omega(), T.omega()) * T.count_hom(T.terminal(), T.omega()));
    EXPECT_EQ(T.count_hom(T.initial(), T.omega()), 1u);
  }
}

TEST(PresheafTopos, SetExponentialSizes) {
  Topos S(FiniteCategory::point());
  auto X = constant_presheaf(S.base_ptr(), {"a", "b"});
  auto Y = constant_presheaf(S.base_ptr(), {"0", "1", "2"});
  EXPECT_EQ(S.exponential(X, Y).object.size(0), 9u);
  auto PX = S.power_object(X);
  EXPECT_EQ(PX.object.labels(0), (std::vector<std::string>{"{}", "{b}", "{a}", "{a,b}"}));
}

TEST(PresheafTopos, PowerOfTerminalIsOmega) {
  for (const auto& C : fixtures::all_categories()) {
    Topos T(C);
    auto P1 = T.power_object(T.terminal());
    std::vector<std::vector<Elem>> comps(C->num_objects());
    for (ObjId a = 0; a < C->num_objects(); ++a)
      for (Elem th = 0; th < P1.object.size(a); ++th) comps[a].push_back(P1.apply(a, th, C->identity(a), 0));
    NatTransform iso(P1.object, T.omega(), comps);
    EXPECT_TRUE(validate_nat(iso).ok());
    EXPECT_TRUE(is_isomorphism(iso));
  }
}

TEST(PresheafTopos, ExponentialAdjunction) {
  for (const auto& C : {fixtures::point(), fixtures::two_point(), fixtures::idempotent(), fixtures::parallel(),
                        fixtures::chain3()}) {
    Topos T(C);
    std::vector<Presheaf> small{T.terminal(), T.omega(), representable(C, 0)};
    std::vector<Presheaf> values{T.omega(), T.terminal(), T.coproduct(T.terminal(), T.terminal())};
    auto fits = [&](const Presheaf& X) {
      for (ObjId a = 0; a < C->num_objects(); ++a)
        if (X.size(a) > 3) return false;
      return true;
    };
    for (const auto& Z : small)
      for (const auto& X : small)
        for (const auto& Y : values) {
          if (!fits(Z) || !fits(X) || !fits(Y)) continue;
          auto r = verify_exponential_adjunction(T, Z, X, Y);
          EXPECT_TRUE(r.ok()) << r.left << " vs " << r.right;
          const auto ZX = T.product({Z, X}).object;
          if (ZX.total_size() <= 10) {
            EXPECT_EQ(r.left, brute_hom_count(ZX, Y));
          }
        }
  }
}

TEST(PresheafTopos, EvaluationAfterTranspose) {
  Topos T(fixtures::two_point());
  const auto& X = T.omega();
  auto PX = T.power_object(X);
  auto Z = representable(T.base_ptr(), 1);
  auto zx = T.product({Z, X});
  auto x_px = T.product({X, PX.object});
  auto ev = T.evaluation(PX, x_px);
  EXPECT_TRUE(validate_nat(ev).ok());
  for (const auto& f : T.hom(zx.object, T.omega())) {
    auto g = T.transpose(f, zx, PX);
    // ev ∘ (π_X, g ∘ π_Z) = f
    auto lhs = compose(ev, T.pair(x_px, {zx.projections[1], compose(g, zx.projections[0])}));
    EXPECT_EQ(lhs, f);
  }
}

TEST(PresheafTopos, NameOfWholeEvaluatesToTrue) {
  Topos T(fixtures::two_point());
  const auto& X = T.omega();
  auto PX = T.power_object(X);
  auto name = T.name_of(T.whole(X), PX);
  auto x_px = T.product({X, PX.object});
  auto ev = T.evaluation(PX, x_px);
  auto bang = to_terminal(X, T.terminal());
  auto at_name = compose(ev, T.pair(x_px, {identity_arrow(X), compose(T.arrow_of(name), bang)}));
  EXPECT_EQ(at_name, T.constant_true(X));
  // names of distinct sub-objects differ
  std::set<std::vector<Elem>> names;
  for (const auto& K : T.subobjects(X)) names.insert(T.name_of(K, PX).choice);
  EXPECT_EQ(names.size(), T.subobjects(X).size());
  EXPECT_EQ(names.size(), T.global_elements(PX.object).size());
}

TEST(PresheafTopos, GlobalElements) {
  Topos T(fixtures::two_point());
  auto g = T.global_elements(T.omega());
  ASSERT_EQ(g.size(), 3u);
  std::vector<std::string> got;
  for (const auto& e : g) got.push_back(T.omega().label(0, e.choice[0]) + "/" + T.omega().label(1, e.choice[1]));
  EXPECT_EQ(got, (std::vector<std::string>{"{}/{}", "{id_p}/{i_p_q}", "{id_p}/{i_p_q,id_q}"}));
  EXPECT_EQ(T.global_elements(T.terminal()).size(), 1u);
  Topos S(FiniteCategory::point());
  EXPECT_EQ(S.global_elements(constant_presheaf(S.base_ptr(), {"a", "b", "c"})).size(), 3u);
  for (const auto& e : g)
    for (MorId f = 0; f < T.base().num_morphisms(); ++f)
      EXPECT_EQ(T.omega().restrict(f, e.choice[T.base().cod(f)]), e.choice[T.base().dom(f)]);
}

TEST(PresheafTopos, TruthValuesFormHeytingAlgebra) {
  for (const auto& C : fixtures::all_categories()) {
    Topos T(C);
    auto H = T.truth_values();
    EXPECT_TRUE(heyting::check_heyting_laws(H).ok());
    EXPECT_EQ(H.size(), T.global_elements(T.omega()).size());
  }
}

TEST(PresheafTopos, PullbackOfSubobjectIsMonotone) {
  Topos T(fixtures::two_point());
  auto P = T.product({T.omega(), T.terminal()});
  const auto& h = P.projections[0];  // Ω × 1 -> Ω
  auto subs = T.subobjects(T.omega());
  for (const auto& K : subs)
    for (const auto& L : subs) {
      bool le = true;
      for (ObjId a = 0; a < 2; ++a) le = le && K.parts[a].is_subset_of(L.parts[a]);
      if (!le) continue;
      auto hK = T.pullback_subobject(h, K), hL = T.pullback_subobject(h, L);
      for (ObjId a = 0; a < 2; ++a) EXPECT_TRUE(hK.parts[a].is_subset_of(hL.parts[a]));
    }
}

TEST(PresheafTopos, CapIsEnforced) {
  EXPECT_THROW(Topos(fixtures::diamond(), 4), CapExceededError);  // 6 sieves on top
  Topos T(fixtures::diamond(), 6);
  EXPECT_THROW(T.subobjects(T.omega()), CapExceededError);
  EXPECT_THROW(T.hom(T.omega(), T.omega()), CapExceededError);
}
