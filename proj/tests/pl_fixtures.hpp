#pragma once
// PL fixtures: the three-state system, random interval sets, random formulas
// and random Hilbert proofs.

#include <random>
#include <string>
#include <vector>

#include "toposlang/pl.hpp"

namespace pl_fixtures {

using namespace toposlang;
using namespace toposlang::pl;

/// States s1, s2, s3 with A = (1, 5/2, 4) and B = (0, 1, 1).
inline ClassicalSystem three_state() {
  ClassicalSystem s;
  s.states = {"s1", "s2", "s3"};
  s.quantities["A"] = {Rational(1), Rational(5, 2), Rational(4)};
  s.quantities["B"] = {Rational(0), Rational(1), Rational(1)};
  return s;
}

inline Rational random_rational(std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-12, 12), den(1, 4);
  return Rational(num(rng), den(rng));
}

inline IntervalSet random_interval_set(std::mt19937& rng) {
  std::uniform_int_distribution<int> count(0, 3), coin(0, 1), inf(0, 5);
  std::vector<Interval> parts;
  for (int k = count(rng); k > 0; --k) {
    Interval i;
    Rational a = random_rational(rng), b = random_rational(rng);
    if (b < a) std::swap(a, b);
    i.lo = inf(rng) == 0 ? Endpoint{} : Endpoint{false, a, bool(coin(rng))};
    i.hi = inf(rng) == 0 ? Endpoint{} : Endpoint{false, b, bool(coin(rng))};
    parts.push_back(i);
  }
  return IntervalSet(parts);
}

/// Random formula over the given quantity names (primitives "Q in Δ"), or
/// over abstract atoms when `ranged` is false.
inline FormulaPtr random_formula(std::mt19937& rng, const std::vector<std::string>& names, int depth, bool ranged = true) {
  std::uniform_int_distribution<int> op(0, depth <= 0 ? 0 : 5);
  std::uniform_int_distribution<std::size_t> pick(0, names.size() - 1);
  switch (op(rng)) {
    case 0:
    case 1: return ranged ? atom(names[pick(rng)], random_interval_set(rng)) : atom(names[pick(rng)]);
    case 2: return neg(random_formula(rng, names, depth - 1, ranged));
    case 3: return conj(random_formula(rng, names, depth - 1, ranged), random_formula(rng, names, depth - 1, ranged));
    case 4: return disj(random_formula(rng, names, depth - 1, ranged), random_formula(rng, names, depth - 1, ranged));
    default: return impl(random_formula(rng, names, depth - 1, ranged), random_formula(rng, names, depth - 1, ranged));
  }
}

/// A random valid Hilbert proof: axiom instances over random subformulas,
/// closed off by modus ponens whenever two earlier lines fit.
inline HilbertProof random_proof(std::mt19937& rng, const std::vector<std::string>& atoms, std::size_t axioms = 4) {
  HilbertProof p;
  const auto& schemas = hilbert_schemas();
  std::uniform_int_distribution<std::size_t> pick(0, schemas.size() - 1);
  for (std::size_t k = 0; k < axioms; ++k) {
    std::map<std::string, FormulaPtr> bind;
    for (const char* v : {"a", "b", "c"}) bind[v] = random_formula(rng, atoms, 1, false);
    // often make the antecedent an identity so modus ponens can fire below
    if (std::uniform_int_distribution<int>(0, 1)(rng)) {
      auto x = atom(atoms[std::uniform_int_distribution<std::size_t>(0, atoms.size() - 1)(rng)]);
      bind["a"] = impl(x, x);
    }
    const auto& s = schemas[pick(rng)];
    p.lines.push_back({instantiate(s.second, bind), "axiom", s.first});
  }
  // identity proofs give usable premises a -> a
  for (const auto& a : atoms) {
    auto id = identity_proof(atom(a));
    const std::size_t base = p.lines.size();
    for (auto l : id.lines) {
      if (l.rule == "mp") l.major += base, l.minor += base;
      p.lines.push_back(l);
    }
  }
  // saturate with modus ponens a bounded number of times
  for (int round = 0; round < 3; ++round) {
    const std::size_t n = p.lines.size();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const auto& ab = p.lines[j].formula;
        if (ab->kind == Formula::Kind::Implies && equal(ab->lhs, p.lines[i].formula))
          p.lines.push_back({ab->rhs, "mp", "", i + 1, j + 1});
        if (p.lines.size() > 60) return p;
      }
  }
  return p;
}

}  // namespace pl_fixtures
