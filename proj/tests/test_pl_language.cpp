#include <gtest/gtest.h>

#include "pl_fixtures.hpp"
#include "toposlang/finite_category.hpp"
#include "toposlang/pl.hpp"

using namespace toposlang;
using namespace toposlang::pl;

namespace {

IntervalSet iv(const std::string& s) { return parse_interval_set(s); }

// Probe points: every endpoint, midpoints between them, and far-out values.
std::vector<Rational> probes(std::initializer_list<const IntervalSet*> sets) {
  std::vector<Rational> pts{Rational(-1000), Rational(1000)};
  for (auto* s : sets)
    for (const auto& i : s->parts()) {
      if (!i.lo.infinite) pts.push_back(i.lo.value);
      if (!i.hi.infinite) pts.push_back(i.hi.value);
    }
  std::sort(pts.begin(), pts.end());
  const std::size_t n = pts.size();
  for (std::size_t k = 0; k + 1 < n; ++k) pts.push_back((pts[k] + pts[k + 1]) / 2);
  return pts;
}

bool classically_valid(const FormulaPtr& f) {
  const auto atoms = atoms_of(f);
  for (std::uint32_t mask = 0; mask < (1u << atoms.size()); ++mask) {
    KripkeModel m{1, {1}, {}};
    for (std::size_t k = 0; k < atoms.size(); ++k) m.valuation[to_string(atoms[k])] = mask >> k & 1;
    if (!m.forces(0, f)) return false;
  }
  return true;
}

heyting::SetAlgebra sierpinski() { return heyting::open_set_algebra({"1", "2"}, {{}, {"1"}, {"1", "2"}}); }

std::vector<heyting::SetAlgebra> built_algebras() {
  auto C = cat::FiniteCategory::from_poset(Poset({"p", "q"}, {{"p", "q"}}));
  return {heyting::powerset_algebra({"1", "2"}), heyting::powerset_algebra({"1", "2", "3"}), sierpinski(),
          heyting::lower_set_algebra(Poset({"a", "b", "c"}, {{"a", "b"}, {"a", "c"}})),
          heyting::lower_set_algebra(Poset({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}})), cat::sieve_heyting(C, 1)};
}

}  // namespace

TEST(Intervals, ParseAndPrint) {
  EXPECT_EQ(iv("[1,3]").str(), "[1,3]");
  EXPECT_EQ(iv("[1,2) u (3,+inf)").parts().size(), 2u);
  EXPECT_EQ(iv("[1,3] u [2,5]").str(), "[1,5]");
  EXPECT_EQ(iv("[1,2) u [2,3]").str(), "[1,3]");
  EXPECT_EQ(iv("[1,2) u (2,3]").str(), "[1,2) u (2,3]");
  EXPECT_EQ(iv("[0.5, 5/2]").str(), "[1/2,5/2]");
  EXPECT_EQ(iv("(3,1)").str(), "{}");
  EXPECT_EQ(iv("{}").str(), "{}");
  EXPECT_EQ(iv("(-inf,+inf)"), IntervalSet::real_line());
  EXPECT_THROW(iv("[-inf,2]"), ParseError);
  EXPECT_THROW(iv("[1,2"), ParseError);
  EXPECT_THROW(iv("[a,2]"), ParseError);
  EXPECT_THROW(iv("(+inf,2)"), ParseError);
  EXPECT_THROW(iv("[1,1/0]"), ParseError);
}

TEST(Intervals, Operations) {
  EXPECT_EQ(intersect(iv("[1,3]"), iv("[2,5]")).str(), "[2,3]");
  EXPECT_EQ(iv("(0,1)").complement().str(), "(-inf,0] u [1,+inf)");
  EXPECT_TRUE(iv("[2,5]").member(Rational(5, 2)));
  EXPECT_FALSE(iv("(2,5)").member(Rational(2)));
  EXPECT_EQ(IntervalSet::real_line().complement(), IntervalSet::empty_set());
  EXPECT_EQ(IntervalSet::empty_set().complement(), IntervalSet::real_line());
  EXPECT_EQ(iv("[1,1]").complement().str(), "(-inf,1) u (1,+inf)");
}

TEST(Intervals, RandomOperationsAgreeWithMembership) {
  std::mt19937 rng(11);
  for (int k = 0; k < 500; ++k) {
    const auto a = pl_fixtures::random_interval_set(rng), b = pl_fixtures::random_interval_set(rng);
    const auto i = intersect(a, b), u = unite(a, b), c = a.complement();
    for (const auto& q : probes({&a, &b})) {
      ASSERT_EQ(i.member(q), a.member(q) && b.member(q)) << a.str() << " & " << b.str() << " at " << q;
      ASSERT_EQ(u.member(q), a.member(q) || b.member(q)) << a.str() << " | " << b.str() << " at " << q;
      ASSERT_EQ(c.member(q), !a.member(q)) << a.str() << " at " << q;
    }
    // normal form: equal membership on all probes implies structural equality
    EXPECT_EQ(c.complement(), a);
    EXPECT_EQ(unite(a, c), IntervalSet::real_line());
    EXPECT_EQ(iv(a.str()), a);
  }
}

TEST(PlSyntax, ParseExamples) {
  auto f = parse_pl("A in [2,5] & B in (0,1)");
  ASSERT_EQ(f->kind, Formula::Kind::And);
  EXPECT_EQ(f->lhs->name, "A");
  EXPECT_EQ(f->lhs->range->str(), "[2,5]");
  EXPECT_EQ(f->rhs->range->str(), "(0,1)");

  auto g = parse_pl("~A in [0,1] -> B in [1,2] -> C in [2,3]");
  ASSERT_EQ(g->kind, Formula::Kind::Implies);
  EXPECT_EQ(g->lhs->kind, Formula::Kind::Not);
  EXPECT_EQ(g->rhs->kind, Formula::Kind::Implies);

  auto h = parse_pl("A in [1,2) u (3,+inf)");
  EXPECT_EQ(h->range->parts().size(), 2u);

  auto t = parse_pl("A@t1 in [0,1] | A@t2 in {}");
  EXPECT_EQ(t->lhs->name, "A@t1");
  EXPECT_TRUE(t->rhs->range->empty());

  EXPECT_EQ(to_string(parse_pl("a & b | c")), "a & b | c");
  EXPECT_EQ(to_string(parse_pl("a & (b | c)")), "a & (b | c)");
  EXPECT_EQ(to_string(parse_pl("(a -> b) -> c")), "(a -> b) -> c");
  EXPECT_EQ(to_string(parse_pl("a -> (b -> c)")), "a -> b -> c");
  EXPECT_EQ(to_string(parse_pl("~~(a | ~a)")), "~~(a | ~a)");
  EXPECT_EQ(to_string(parse_pl("(a & b) & c")), "a & b & c");
  EXPECT_EQ(to_string(parse_pl("a & (b & c)")), "a & (b & c)");
}

TEST(PlSyntax, Errors) {
  EXPECT_THROW(parse_pl("A in"), ParseError);
  EXPECT_THROW(parse_pl("A in [1,2"), ParseError);
  EXPECT_THROW(parse_pl("a &"), ParseError);
  EXPECT_THROW(parse_pl("(a"), ParseError);
  EXPECT_THROW(parse_pl("a $ b"), ParseError);
  EXPECT_THROW(parse_pl("in"), ParseError);
  try {
    parse_pl("a & & b");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
  auto [f, note] = parse_pl_noting_normalization("A in [1,3] u [2,5]");
  EXPECT_TRUE(note);
  EXPECT_EQ(to_string(f), "A in [1,5]");
  EXPECT_FALSE(parse_pl_noting_normalization("A in [1,5]").second);
}

TEST(PlSyntax, PrintParseRoundTrip) {
  std::mt19937 rng(5);
  for (int k = 0; k < 500; ++k) {
    auto f = pl_fixtures::random_formula(rng, {"A", "B", "x@t"}, 4, k % 2 == 0);
    auto text = to_string(f);
    auto g = parse_pl(text);
    ASSERT_TRUE(equal(f, g)) << text;
    EXPECT_EQ(to_string(g), text);
  }
}

TEST(PlRepresent, Examples) {
  auto H = heyting::powerset_algebra({"1", "2", "3"});
  std::map<std::string, heyting::ElemId> t{{"a", H.find("{1,2}")}, {"b", H.find("{2,3}")}};
  EXPECT_EQ(H.label(pl_represent(parse_pl("a & b"), H, t)), "{2}");
  EXPECT_EQ(pl_represent(parse_pl("a -> a"), H, t), H.top());
  EXPECT_THROW(pl_represent(parse_pl("a & c"), H, t), UnknownElementError);
  auto S = sierpinski();
  std::map<std::string, heyting::ElemId> s{{"a", S.find("{1}")}};
  EXPECT_EQ(S.label(pl_represent(parse_pl("a | ~a"), S, s)), "{1}");
  // the untabled powerset works through the same template
  heyting::PowersetAlgebra P({"x", "y"});
  std::map<std::string, Bitset> pt{{"a", Bitset(2, 1)}};
  EXPECT_EQ(pl_represent(parse_pl("a | ~a"), P, pt), P.top());
}

TEST(PlRepresent, DoubleNegationOnlyClassically) {
  // classically ¬¬(A ∈ Δ) and A ∈ Δ have the same image
  auto sys = pl_fixtures::three_state();
  auto a = parse_pl("A in [2,5]");
  EXPECT_EQ(classical_represent(neg(neg(a)), sys), classical_represent(a, sys));
  EXPECT_EQ(classical_represent(neg(neg(a)), sys), classical_represent(atom("A", iv("[2,5]").complement().complement()), sys));
  // in the Sierpinski algebra ¬¬{1} = top ≠ {1}
  auto S = sierpinski();
  std::map<std::string, heyting::ElemId> s{{"a", S.find("{1}")}};
  EXPECT_EQ(pl_represent(parse_pl("~~a"), S, s), S.top());
  EXPECT_NE(pl_represent(parse_pl("~~a"), S, s), pl_represent(parse_pl("a"), S, s));
}

TEST(Classical, Representation) {
  auto sys = pl_fixtures::three_state();
  heyting::PowersetAlgebra P(sys.states);
  EXPECT_EQ(P.label(classical_represent(parse_pl("A in [2,5]"), sys)), "{s2,s3}");
  EXPECT_EQ(P.label(classical_represent(parse_pl("A in (-inf,+inf)"), sys)), "{s1,s2,s3}");
  EXPECT_EQ(P.label(classical_represent(parse_pl("A in {}"), sys)), "{}");
  EXPECT_EQ(P.label(classical_represent(parse_pl("~A in [2,5]"), sys)), "{s1}");
  EXPECT_THROW(classical_represent(parse_pl("Z in [0,1]"), sys), UnknownElementError);
  EXPECT_THROW(classical_represent(parse_pl("a"), sys), UnknownElementError);
  auto broken = sys;
  broken.quantities["C"] = {Rational(1)};
  EXPECT_THROW(broken.validate(), InvalidStructureError);
}

TEST(Classical, TruthValues) {
  auto sys = pl_fixtures::three_state();
  EXPECT_FALSE(truth_value(parse_pl("A in [2,5]"), "s1", sys));
  EXPECT_TRUE(truth_value(parse_pl("A in [2,5]"), "s2", sys));
  EXPECT_THROW(truth_value(parse_pl("A in [2,5]"), "s9", sys), UnknownElementError);
  std::mt19937 rng(3);
  for (int k = 0; k < 200; ++k) {
    auto f = pl_fixtures::random_formula(rng, {"A", "B"}, 3);
    const auto set = classical_represent(f, sys);
    for (std::size_t s = 0; s < sys.states.size(); ++s) {
      ASSERT_EQ(truth_value(f, s, sys), set.test(s)) << to_string(f);
      EXPECT_TRUE(truth_value(disj(f, neg(f)), s, sys));
    }
  }
}

TEST(Classical, OptionalAxioms) {
  auto sys = pl_fixtures::three_state();
  auto r = check_optional_axioms(sys, 300, 9);
  EXPECT_TRUE(r.ok());
  EXPECT_GT(r.checks, 300u);
  // the named examples
  auto a1 = parse_pl("A in [0,2]"), a2 = parse_pl("A in [1,3]");
  EXPECT_EQ(classical_represent(conj(a1, a2), sys), classical_represent(parse_pl("A in [1,2]"), sys));
  EXPECT_EQ(classical_represent(conj(a1, parse_pl("A in {}")), sys), Bitset(3));
  auto d = parse_pl("A in [2,5]");
  EXPECT_EQ(classical_represent(neg(d), sys), ~classical_represent(d, sys));
}

TEST(Hilbert, IdentityProof) {
  auto p = identity_proof(parse_pl("x"));
  EXPECT_EQ(p.lines.size(), 5u);
  auto v = check_proof(p);
  EXPECT_TRUE(v.accepted) << v.message;
  EXPECT_EQ(v.schemas, (std::vector<std::string>{"S", "K", "mp", "K", "mp"}));
}

TEST(Hilbert, Rejections) {
  auto p = identity_proof(parse_pl("x"));
  auto forward = p;
  forward.lines[2].major = 4;  // cites a later line
  auto v = check_proof(forward);
  EXPECT_FALSE(v.accepted);
  EXPECT_EQ(v.line, 3u);

  HilbertProof lem;
  lem.lines.push_back({parse_pl("x | ~x"), "axiom", ""});
  v = check_proof(lem);
  EXPECT_FALSE(v.accepted);
  EXPECT_EQ(v.line, 1u);

  auto wrong_schema = p;
  wrong_schema.lines[0].schema = "K";
  EXPECT_EQ(check_proof(wrong_schema).line, 1u);

  auto bad_mp = p;
  bad_mp.lines[4].minor = 1;
  EXPECT_EQ(check_proof(bad_mp).line, 5u);

  auto wrong_goal = p;
  wrong_goal.goal = parse_pl("y -> y");
  EXPECT_FALSE(check_proof(wrong_goal).accepted);
  EXPECT_FALSE(check_proof(HilbertProof{}).accepted);
}

TEST(Hilbert, SchemaRecognition) {
  EXPECT_EQ(schema_of(parse_pl("p -> q -> p")), "K");
  EXPECT_EQ(schema_of(parse_pl("(p -> q) -> (p -> ~q) -> ~p")), "NegI");
  EXPECT_EQ(schema_of(parse_pl("~p -> p -> q")), "ExF");
  EXPECT_EQ(schema_of(parse_pl("(p -> r) -> (q -> r) -> p | q -> r")), "OrE");
  EXPECT_FALSE(schema_of(parse_pl("p -> q -> q")).has_value());
  EXPECT_FALSE(schema_of(parse_pl("((p -> q) -> p) -> p")).has_value());
}

TEST(Ipc, Examples) {
  EXPECT_TRUE(decide_ipc(parse_pl("a -> a")).valid);
  auto peirce = decide_ipc(parse_pl("((a -> b) -> a) -> a"));
  EXPECT_FALSE(peirce.valid);
  ASSERT_TRUE(peirce.countermodel);
  EXPECT_EQ(peirce.countermodel->worlds, 2u);
  EXPECT_FALSE(peirce.countermodel->forces(0, parse_pl("((a -> b) -> a) -> a")));
  auto lem = decide_ipc(parse_pl("a | ~a"));
  EXPECT_FALSE(lem.valid);
  ASSERT_TRUE(lem.countermodel);
  EXPECT_EQ(lem.countermodel->worlds, 2u);
  EXPECT_TRUE(decide_ipc(parse_pl("~~(a | ~a)")).valid);
  EXPECT_FALSE(decide_ipc(parse_pl("~~a -> a")).valid);
  EXPECT_TRUE(decide_ipc(parse_pl("a -> ~~a")).valid);
  EXPECT_TRUE(decide_ipc(parse_pl("~~~a -> ~a")).valid);
  EXPECT_FALSE(decide_ipc(parse_pl("(a -> b) | (b -> a)")).valid);
  EXPECT_TRUE(decide_ipc(parse_pl("(a | b -> c) -> (a -> c) & (b -> c)")).valid);
  EXPECT_FALSE(decide_ipc(parse_pl("~(a & b) -> ~a | ~b")).valid);
  EXPECT_TRUE(decide_ipc(parse_pl("~(a | b) -> ~a & ~b")).valid);
  // ranged primitives are opaque atoms here
  EXPECT_TRUE(decide_ipc(parse_pl("A in [0,1] -> A in [0,1]")).valid);
  EXPECT_FALSE(decide_ipc(parse_pl("A in [0,1] -> A in [0,2]")).valid);
}

TEST(Ipc, SchemaInstancesAreValid) {
  std::mt19937 rng(2);
  for (const auto& [name, pat] : hilbert_schemas()) {
    EXPECT_TRUE(decide_ipc(pat).valid) << name;
    for (int k = 0; k < 20; ++k) {
      std::map<std::string, FormulaPtr> bind;
      for (const char* v : {"a", "b", "c"}) bind[v] = pl_fixtures::random_formula(rng, {"p", "q", "r"}, 2, false);
      EXPECT_TRUE(decide_ipc(instantiate(pat, bind)).valid) << name;
    }
  }
}

TEST(Ipc, AgreesWithKripkeAndClassicalOracles) {
  std::mt19937 rng(17);
  int valid = 0, invalid = 0;
  for (int k = 0; k < 400; ++k) {
    auto f = pl_fixtures::random_formula(rng, {"p", "q"}, 3, false);
    auto v = decide_ipc(f);
    if (v.valid) {
      ++valid;
      EXPECT_TRUE(classically_valid(f)) << to_string(f);
      EXPECT_FALSE(find_countermodel(f, 3).has_value()) << to_string(f);
    } else {
      ++invalid;
      ASSERT_TRUE(v.countermodel) << to_string(f);
      EXPECT_TRUE(v.countermodel->monotone());
      EXPECT_FALSE(v.countermodel->forces(0, f));
    }
  }
  EXPECT_GT(valid, 20);
  EXPECT_GT(invalid, 20);
}

TEST(Ipc, SearchCap) { EXPECT_THROW(decide_ipc(parse_pl("((a -> b) -> a) -> a"), 1), CapExceededError); }

TEST(Soundness, ProofsRepresentToTop) {
  std::mt19937 rng(23);
  const auto algebras = built_algebras();
  for (int k = 0; k < 200; ++k) {
    auto proof = pl_fixtures::random_proof(rng, {"p", "q"});
    ASSERT_TRUE(check_proof(proof).accepted);
    EXPECT_TRUE(decide_ipc(proof.lines.back().formula).valid);
    const auto& H = algebras[k % algebras.size()];
    std::uniform_int_distribution<heyting::ElemId> pick(0, H.size() - 1);
    std::map<std::string, heyting::ElemId> assign{{"p", pick(rng)}, {"q", pick(rng)}};
    for (const auto& line : proof.lines) ASSERT_EQ(pl_represent(line.formula, H, assign), H.top()) << to_string(line.formula);
  }
}

TEST(Quantum, Nondistributivity) {
  auto r = quantum_nondistributivity_demo();
  EXPECT_EQ(r.b_join_c, "plane");
  EXPECT_EQ(r.a_meet_b, "0");
  EXPECT_EQ(r.lhs, "ray(1,0)");
  EXPECT_EQ(r.rhs, "0");
  EXPECT_TRUE(r.distributivity_fails);
}
