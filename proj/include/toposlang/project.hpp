#pragma once
// Project files: one JSON document declaring categories, presheaves, algebras,
// classical systems, signatures, representations, axiom packs, formulas,
// terms and proofs. Loading resolves every cross-reference and reports the
// first problem with a JSON pointer to it.

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "toposlang/representation.hpp"

namespace toposlang::project {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// A load failure at `pointer` (RFC 6901) inside the project document.
class ProjectError : public Error {
 public:
  ProjectError(std::string kind, const std::string& pointer, const std::string& m)
      : Error(std::move(kind), (pointer.empty() ? std::string("/") : pointer) + ": " + m), pointer_(pointer) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

inline std::string pointer_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

/// A JSON value together with its location.
struct Node {
  const json* value;
  std::string path;

  Node at(const std::string& key) const {
    if (!value->is_object() || !value->contains(key))
      throw ProjectError("schema_error", path, "missing required key `" + key + "`");
    return {&(*value)[key], path + "/" + pointer_token(key)};
  }
  std::optional<Node> find(const std::string& key) const {
    if (!value->is_object() || !value->contains(key)) return std::nullopt;
    return Node{&(*value)[key], path + "/" + pointer_token(key)};
  }
  Node at(std::size_t i) const { return {&(*value)[i], path + "/" + std::to_string(i)}; }

  [[noreturn]] void fail(const std::string& m, const std::string& kind = "schema_error") const {
    throw ProjectError(kind, path, m);
  }
  std::string str() const {
    if (!value->is_string()) fail("expected a string");
    return value->get<std::string>();
  }
  std::size_t index() const {
    if (!value->is_number_unsigned() && !(value->is_number_integer() && value->get<long long>() >= 0))
      fail("expected a non-negative integer");
    return value->get<std::size_t>();
  }
  std::vector<Node> items() const {
    if (!value->is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < value->size(); ++i) out.push_back(at(i));
    return out;
  }
  std::vector<std::pair<std::string, Node>> entries() const {
    if (!value->is_object()) fail("expected an object");
    std::vector<std::pair<std::string, Node>> out;
    for (auto it = value->begin(); it != value->end(); ++it)
      out.emplace_back(it.key(), Node{&it.value(), path + "/" + pointer_token(it.key())});
    return out;
  }
  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    for (const auto& n : items()) out.push_back(n.str());
    return out;
  }
  /// Only the listed keys may appear.
  void only(std::initializer_list<const char*> keys) const {
    if (!value->is_object()) fail("expected an object");
    for (auto it = value->begin(); it != value->end(); ++it)
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
        throw ProjectError("schema_error", path + "/" + pointer_token(it.key()), "unknown key `" + it.key() + "`");
  }
};

// --- resolved model ----------------------------------------------------------------------

struct Algebra {
  std::string kind;
  std::shared_ptr<const heyting::SetAlgebra> algebra;
};

struct Representation {
  std::string kind;  // "classical" | "topos"
  std::shared_ptr<const rep::ToposRep> rep;
  std::optional<rep::EffectiveClassicalRep> classical;
  std::vector<ls::NamedSequent> axioms;
  std::vector<std::string> packs;
};

struct FormulaEntry {
  std::string text;
  pl::FormulaPtr formula;
  std::string system;  // optional
};

struct TermEntry {
  std::string text;
  ls::TermPtr term;
  ls::Type type;
  ls::VarContext context;
  std::string signature;
};

struct Project {
  std::map<std::string, topos::CategoryPtr> categories;
  std::map<std::string, std::shared_ptr<const Poset>> posets;
  std::map<std::string, std::shared_ptr<const topos::Topos>> toposes;  // by category
  std::map<std::string, std::pair<std::string, topos::Presheaf>> presheaves;  // name -> (category, X)
  std::map<std::string, Algebra> algebras;
  std::map<std::string, pl::ClassicalSystem> systems;
  std::map<std::string, ls::Signature> signatures;
  std::map<std::string, ls::AxiomPack> axiom_packs;
  std::map<std::string, Representation> representations;
  std::map<std::string, FormulaEntry> formulas;
  std::map<std::string, TermEntry> terms;
  std::map<std::string, pl::HilbertProof> proofs;
  std::vector<std::string> notes;

  const topos::Topos& topos_of(const std::string& category) const { return *toposes.at(category); }

  template <class M>
  static const typename M::mapped_type& lookup(const M& m, const std::string& name, const char* what) {
    auto it = m.find(name);
    if (it == m.end()) throw UnknownElementError(std::string("unknown ") + what + " `" + name + "`");
    return it->second;
  }
};

// --- loading -----------------------------------------------------------------------------

namespace detail {

class Loader {
 public:
  explicit Loader(const json& doc) : root_{&doc, ""} {}

  Project load() {
    root_.only({"schema_version", "posets", "categories", "presheaves", "algebras", "systems", "signatures",
                "representations", "axiom_packs", "formulas", "terms", "proofs"});
    const auto v = root_.at("schema_version");
    if (!v.value->is_number_integer() || v.value->get<int>() != kSchemaVersion)
      v.fail("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
    p_.axiom_packs.emplace("abelian", ls::abelian_axiom_pack());
    section("posets", [&](const Node& n, const std::string& name) { poset(n, name); });
    section("categories", [&](const Node& n, const std::string& name) { category(n, name); }, "posets");
    section("presheaves", [&](const Node& n, const std::string& name) { presheaf(n, name); });
    section("algebras", [&](const Node& n, const std::string& name) { algebra(n, name); });
    section("systems", [&](const Node& n, const std::string& name) { system(n, name); });
    section("signatures", [&](const Node& n, const std::string& name) { signature(n, name); });
    section("axiom_packs", [&](const Node& n, const std::string& name) { axiom_pack(n, name); });
    section("representations", [&](const Node& n, const std::string& name) { representation(n, name); });
    section("formulas", [&](const Node& n, const std::string& name) { formula(n, name); });
    section("terms", [&](const Node& n, const std::string& name) { term(n, name); });
    section("proofs", [&](const Node& n, const std::string& name) { proof(n, name); });
    return std::move(p_);
  }

 private:
  /// Runs `f` on each entry; names are unique within a section (and across
  /// `shared_with`, for posets and categories).
  template <class F>
  void section(const std::string& key, F f, const std::string& shared_with = "") {
    auto sec = root_.find(key);
    if (!sec) return;
    auto& seen = sites_[shared_with.empty() ? key : shared_with];
    for (const auto& n : sec->items()) {
      const auto name_node = n.at("name");
      const auto name = name_node.str();
      if (name.empty()) name_node.fail("name must not be empty");
      auto [it, fresh] = seen.emplace(name, n.path);
      if (!fresh) throw ProjectError("duplicate_name", n.path, "duplicate name `" + name + "` (first declared at " + it->second + ", again at " + n.path + ")");
      guard(n, [&] { f(n, name); });
    }
  }

  /// Library errors raised while building an entry are reported at its path.
  template <class F>
  static void guard(const Node& n, F f) {
    try {
      f();
    } catch (const ProjectError&) {
      throw;
    } catch (const UnknownElementError& e) {
      throw ProjectError("reference_error", n.path, e.what());
    } catch (const Error& e) {
      throw ProjectError(e.kind(), n.path, e.what());
    }
  }

  template <class M>
  const typename M::mapped_type& ref(const M& m, const Node& n, const char* what) {
    const auto name = n.str();
    auto it = m.find(name);
    if (it == m.end()) n.fail(std::string("unknown ") + what + " `" + name + "`", "reference_error");
    return it->second;
  }

  void add_category(const std::string& name, cat::FiniteCategory C) {
    auto ptr = std::make_shared<const cat::FiniteCategory>(std::move(C));
    p_.categories.emplace(name, ptr);
    p_.toposes.emplace(name, std::make_shared<const topos::Topos>(ptr));
  }

  void poset(const Node& n, const std::string& name) {
    n.only({"name", "elements", "order"});
    std::vector<std::pair<std::string, std::string>> order;
    if (auto o = n.find("order"))
      for (const auto& pr : o->items()) {
        auto ab = pr.strings();
        if (ab.size() != 2) pr.fail("an order entry is a pair [lower, upper]");
        order.emplace_back(ab[0], ab[1]);
      }
    auto P = std::make_shared<const Poset>(n.at("elements").strings(), order);
    p_.posets.emplace(name, P);
    add_category(name, cat::FiniteCategory::from_poset(*P));
  }

  void category(const Node& n, const std::string& name) {
    n.only({"name", "objects", "morphisms", "identities", "compose"});
    const auto objects = n.at("objects").strings();
    std::map<std::string, cat::ObjId> obj;
    for (std::size_t i = 0; i < objects.size(); ++i) obj.emplace(objects[i], i);
    auto object = [&](const Node& x) {
      auto it = obj.find(x.str());
      if (it == obj.end()) x.fail("unknown object `" + x.str() + "`", "reference_error");
      return it->second;
    };
    std::vector<cat::Morphism> ms;
    std::map<std::string, cat::MorId> mor;
    for (const auto& m : n.at("morphisms").items()) {
      m.only({"name", "dom", "cod"});
      mor.emplace(m.at("name").str(), ms.size());
      ms.push_back({m.at("name").str(), object(m.at("dom")), object(m.at("cod"))});
    }
    auto morphism = [&](const Node& x) {
      auto it = mor.find(x.str());
      if (it == mor.end()) x.fail("unknown morphism `" + x.str() + "`", "reference_error");
      return it->second;
    };
    std::vector<cat::MorId> ids(objects.size(), ms.size());
    for (const auto& [o, m] : n.at("identities").entries()) {
      auto it = obj.find(o);
      if (it == obj.end()) m.fail("unknown object `" + o + "`", "reference_error");
      ids[it->second] = morphism(m);
    }
    for (std::size_t a = 0; a < objects.size(); ++a)
      if (ids[a] == ms.size()) n.at("identities").fail("object `" + objects[a] + "` has no identity");
    // composites with an identity are implied
    std::map<std::pair<cat::MorId, cat::MorId>, cat::MorId> table;
    for (cat::MorId f = 0; f < ms.size(); ++f) {
      table[{ids[ms[f].cod], f}] = f;
      table[{f, ids[ms[f].dom]}] = f;
    }
    if (auto c = n.find("compose"))
      for (const auto& e : c->items()) {
        if (!e.value->is_array() || e.value->size() != 3) e.fail("a composition entry is [f, g, f∘g]");
        const auto f = morphism(e.at(0)), g = morphism(e.at(1)), fg = morphism(e.at(2));
        auto [it, fresh] = table.emplace(std::make_pair(f, g), fg);
        if (!fresh && it->second != fg) e.fail("conflicting composite for (" + ms[f].name + ", " + ms[g].name + ")");
      }
    std::vector<cat::FiniteCategory::Composite> comps;
    for (const auto& [fg, h] : table) comps.push_back({fg.first, fg.second, h});
    cat::FiniteCategory C(objects, std::move(ms), ids, comps);
    const auto report = cat::validate_category(C);
    if (!report.ok()) n.fail("not a category: " + report.violations.front().kind + ": " + report.violations.front().detail, "invalid_structure");
    add_category(name, std::move(C));
  }

  void presheaf(const Node& n, const std::string& name) {
    n.only({"name", "category", "kind", "object", "stages", "restrictions"});
    const auto cname = n.at("category").str();
    const auto& C = ref(p_.categories, n.at("category"), "category");
    const auto& T = *p_.toposes.at(cname);
    const std::string kind = n.find("kind") ? n.at("kind").str() : "explicit";
    topos::Presheaf X;
    if (kind == "terminal") {
      X = T.terminal();
    } else if (kind == "omega") {
      X = T.omega();
    } else if (kind == "representable") {
      X = topos::representable(C, C->object_index(n.at("object").str()));
    } else if (kind == "explicit") {
      X = explicit_presheaf(n, C);
    } else {
      n.at("kind").fail("unknown presheaf kind `" + kind + "`");
    }
    p_.presheaves.emplace(name, std::make_pair(cname, X));
  }

  static topos::Presheaf explicit_presheaf(const Node& n, const topos::CategoryPtr& C) {
    std::vector<std::vector<std::string>> stages(C->num_objects());
    std::vector<bool> given(C->num_objects(), false);
    for (const auto& [o, labels] : n.at("stages").entries()) {
      const auto a = C->object_index(o);
      stages[a] = labels.strings();
      given[a] = true;
      std::set<std::string> seen;
      for (const auto& l : stages[a])
        if (!seen.insert(l).second) labels.fail("duplicate element `" + l + "`");
    }
    for (cat::ObjId a = 0; a < C->num_objects(); ++a)
      if (!given[a]) n.at("stages").fail("missing stage for object `" + C->object(a) + "`");
    auto find = [&](cat::ObjId a, const Node& x) -> topos::Elem {
      const auto& st = stages[a];
      auto it = std::find(st.begin(), st.end(), x.str());
      if (it == st.end()) x.fail("no element `" + x.str() + "` at stage `" + C->object(a) + "`", "reference_error");
      return it - st.begin();
    };
    std::vector<std::vector<topos::Elem>> maps(C->num_morphisms());
    std::vector<bool> mapped(C->num_morphisms(), false);
    if (auto r = n.find("restrictions"))
      for (const auto& [m, table] : r->entries()) {
        const auto f = C->morphism_index(m);
        const auto a = C->cod(f), b = C->dom(f);
        maps[f].assign(stages[a].size(), 0);
        std::vector<bool> hit(stages[a].size(), false);
        for (const auto& [x, y] : table.entries()) {
          auto it = std::find(stages[a].begin(), stages[a].end(), x);
          if (it == stages[a].end()) y.fail("no element `" + x + "` at stage `" + C->object(a) + "`", "reference_error");
          const std::size_t k = it - stages[a].begin();
          maps[f][k] = find(b, y);
          hit[k] = true;
        }
        for (std::size_t k = 0; k < hit.size(); ++k)
          if (!hit[k]) table.fail("restriction is not total: `" + stages[a][k] + "` has no image");
        mapped[f] = true;
      }
    for (cat::MorId f = 0; f < C->num_morphisms(); ++f) {
      if (mapped[f]) continue;
      if (!C->is_identity(f)) n.fail("missing restriction along `" + C->name(f) + "`");
      maps[f].resize(stages[C->dom(f)].size());
      for (topos::Elem x = 0; x < maps[f].size(); ++x) maps[f][x] = x;
    }
    topos::Presheaf X(C, std::move(stages), std::move(maps));
    const auto rep = topos::validate_presheaf(X);
    if (!rep.ok()) n.fail("not a presheaf: " + rep.violations.front().kind + ": " + rep.violations.front().detail, "invalid_structure");
    return X;
  }

  void algebra(const Node& n, const std::string& name) {
    n.only({"name", "kind", "points", "opens", "poset", "category", "object", "presheaf"});
    const auto kind = n.at("kind").str();
    std::shared_ptr<const heyting::SetAlgebra> A;
    if (kind == "powerset") {
      A = std::make_shared<const heyting::SetAlgebra>(heyting::powerset_algebra(n.at("points").strings()));
    } else if (kind == "open_sets") {
      std::vector<std::vector<std::string>> opens;
      for (const auto& o : n.at("opens").items()) opens.push_back(o.strings());
      A = std::make_shared<const heyting::SetAlgebra>(heyting::open_set_algebra(n.at("points").strings(), opens));
    } else if (kind == "lower_sets") {
      A = std::make_shared<const heyting::SetAlgebra>(heyting::lower_set_algebra(*ref(p_.posets, n.at("poset"), "poset")));
    } else if (kind == "sieves") {
      const auto& C = ref(p_.categories, n.at("category"), "category");
      A = std::make_shared<const cat::SieveAlgebra>(*C, C->object_index(n.at("object").str()));
    } else if (kind == "subobjects") {
      const auto& [cname, X] = ref(p_.presheaves, n.at("presheaf"), "presheaf");
      A = std::make_shared<const topos::SubobjectAlgebra>(p_.topos_of(cname), X);
    } else {
      n.at("kind").fail("unknown algebra kind `" + kind + "`");
    }
    p_.algebras.emplace(name, Algebra{kind, std::move(A)});
  }

  void system(const Node& n, const std::string& name) {
    n.only({"name", "states", "quantities"});
    pl::ClassicalSystem sys;
    sys.states = n.at("states").strings();
    for (const auto& [q, table] : n.at("quantities").entries()) {
      std::vector<std::optional<Rational>> vals(sys.states.size());
      for (const auto& [s, v] : table.entries()) {
        auto it = std::find(sys.states.begin(), sys.states.end(), s);
        if (it == sys.states.end()) v.fail("quantity `" + q + "` names unknown state `" + s + "`", "reference_error");
        Rational r;
        try {
          r = parse_rational(v.str());
        } catch (const Error& e) {
          v.fail(e.what());
        }
        const auto canon = format_rational(r);
        if (canon != v.str()) p_.notes.push_back(v.path + ": value `" + v.str() + "` read as " + canon);
        vals[it - sys.states.begin()] = r;
      }
      std::vector<Rational> total;
      for (std::size_t k = 0; k < vals.size(); ++k) {
        if (!vals[k]) table.fail("quantity `" + q + "` has no value at state `" + sys.states[k] + "`");
        total.push_back(*vals[k]);
      }
      sys.quantities.emplace(q, std::move(total));
    }
    sys.validate();
    p_.systems.emplace(name, std::move(sys));
  }

  static ls::Symbol symbol(const Node& n) {
    n.only({"dom", "cod"});
    return {ls::parse_ls_type(n.at("dom").str()), ls::parse_ls_type(n.at("cod").str())};
  }

  void signature(const Node& n, const std::string& name) {
    n.only({"name", "grounds", "symbols"});
    ls::Signature sig;
    if (auto g = n.find("grounds"))
      for (const auto& x : g->strings()) sig.ground(x);
    for (const auto& [f, s] : n.at("symbols").entries()) {
      const auto sy = symbol(s);
      sig.symbol(f, sy.dom, sy.cod);
    }
    guard(n, [&] { sig.validate(); });
    p_.signatures.emplace(name, std::move(sig));
  }

  static ls::VarContext context(const std::optional<Node>& n) {
    ls::VarContext ctx;
    if (n)
      for (const auto& [x, t] : n->entries()) ctx.emplace(x, ls::parse_ls_type(t.str()));
    return ctx;
  }

  void axiom_pack(const Node& n, const std::string& name) {
    n.only({"name", "symbols", "context", "axioms"});
    ls::AxiomPack pack;
    pack.name = name;
    ls::Signature sig;
    if (auto s = n.find("symbols"))
      for (const auto& [f, sy] : s->entries()) pack.symbols.emplace(f, symbol(sy));
    sig.symbols = pack.symbols;
    for (const auto& [g, s] : pack.symbols) {
      ls::grounds_of(s.dom, sig.grounds);
      ls::grounds_of(s.cod, sig.grounds);
    }
    const auto ctx = context(n.find("context"));
    for (const auto& a : n.at("axioms").items()) {
      a.only({"name", "sequent"});
      guard(a, [&] { pack.axioms.push_back({a.at("name").str(), ls::parse_sequent(a.at("sequent").str(), sig, ctx)}); });
    }
    p_.axiom_packs.insert_or_assign(name, std::move(pack));
  }

  std::vector<std::string> packs_of(const Node& n, ls::Signature& sig, std::vector<ls::NamedSequent>& axioms) {
    std::vector<std::string> names;
    if (auto ps = n.find("axiom_packs"))
      for (const auto& x : ps->items()) {
        const auto& pack = ref(p_.axiom_packs, x, "axiom pack");
        guard(x, [&] { pack.extend(sig); });
        axioms.insert(axioms.end(), pack.axioms.begin(), pack.axioms.end());
        names.push_back(pack.name);
      }
    return names;
  }

  void representation(const Node& n, const std::string& name) {
    const auto kind = n.at("kind").str();
    Representation r;
    r.kind = kind;
    if (kind == "classical") {
      n.only({"name", "kind", "system", "axiom_packs"});
      const auto& sys = ref(p_.systems, n.at("system"), "system");
      ls::Signature scratch;
      r.packs = packs_of(n, scratch, r.axioms);
      if (!scratch.symbols.empty())
        n.at("axiom_packs").fail("the classical backend interprets only the system's quantities, not pack symbols");
      r.classical = rep::effective_classical_rep(sys);
      r.rep = std::make_shared<const rep::ToposRep>(r.classical->rep);
    } else if (kind == "topos") {
      n.only({"name", "kind", "category", "signature", "grounds", "symbols", "axiom_packs"});
      const auto cname = n.at("category").str();
      ref(p_.categories, n.at("category"), "category");
      const auto T = p_.toposes.at(cname);
      ls::Signature sig = ref(p_.signatures, n.at("signature"), "signature");
      r.packs = packs_of(n, sig, r.axioms);
      std::map<std::string, topos::Presheaf> grounds;
      for (const auto& [g, x] : n.at("grounds").entries()) {
        const auto& [xc, X] = ref(p_.presheaves, x, "presheaf");
        if (xc != cname) x.fail("presheaf `" + x.str() + "` lives over `" + xc + "`, not `" + cname + "`");
        grounds.emplace(g, X);
      }
      for (const auto& g : sig.grounds)
        if (!grounds.count(g)) n.at("grounds").fail("ground type `" + g + "` is not assigned");
      const rep::ToposRep shapes(T, sig, grounds, {});
      std::map<std::string, topos::NatTransform> symbols;
      const auto& C = T->base();
      for (const auto& [f, table] : n.at("symbols").entries()) {
        auto sit = sig.symbols.find(f);
        if (sit == sig.symbols.end()) table.fail("symbol `" + f + "` is not in the signature", "reference_error");
        const auto& dom = shapes.type(sit->second.dom);
        const auto& cod = shapes.type(sit->second.cod);
        std::vector<std::vector<topos::Elem>> comps(C.num_objects());
        for (cat::ObjId a = 0; a < C.num_objects(); ++a) {
          const auto stage = table.at(C.object(a));
          comps[a].assign(dom.size(a), 0);
          for (topos::Elem x = 0; x < dom.size(a); ++x) {
            const auto y = stage.at(dom.label(a, x));
            guard(y, [&] { comps[a][x] = cod.find(a, y.str()); });
          }
        }
        symbols.emplace(f, topos::NatTransform(dom, cod, std::move(comps)));
      }
      r.rep = std::make_shared<const rep::ToposRep>(rep::build_rep(T, sig, grounds, symbols));
    } else {
      n.at("kind").fail("unknown representation kind `" + kind + "`");
    }
    p_.representations.emplace(name, std::move(r));
  }

  void formula(const Node& n, const std::string& name) {
    n.only({"name", "text", "system"});
    const auto text = n.at("text");
    FormulaEntry e;
    e.text = text.str();
    bool normalized = false;
    guard(text, [&] { std::tie(e.formula, normalized) = pl::parse_pl_noting_normalization(e.text); });
    if (normalized)
      p_.notes.push_back(text.path + ": interval normalized, formula reads `" + pl::to_string(e.formula) + "`");
    if (auto s = n.find("system")) {
      e.system = s->str();
      const auto& sys = ref(p_.systems, *s, "system");
      for (const auto& a : pl::atoms_of(e.formula)) {
        if (!a->range) text.fail("abstract atom `" + a->name + "` has no range in a classical system");
        if (!sys.quantities.count(a->name))
          text.fail("formula mentions quantity `" + a->name + "` unknown to system `" + e.system + "`", "reference_error");
      }
    }
    p_.formulas.emplace(name, std::move(e));
  }

  void term(const Node& n, const std::string& name) {
    n.only({"name", "signature", "context", "text"});
    TermEntry e;
    e.signature = n.at("signature").str();
    const auto& sig = ref(p_.signatures, n.at("signature"), "signature");
    e.context = context(n.find("context"));
    e.text = n.at("text").str();
    guard(n.at("text"), [&] {
      e.term = ls::parse_ls(e.text, sig, e.context);
      e.type = ls::infer_type(e.term, sig, e.context);
    });
    p_.terms.emplace(name, std::move(e));
  }

  void proof(const Node& n, const std::string& name) {
    n.only({"name", "goal", "lines"});
    pl::HilbertProof pr;
    if (auto g = n.find("goal")) guard(*g, [&] { pr.goal = pl::parse_pl(g->str()); });
    for (const auto& l : n.at("lines").items()) {
      l.only({"formula", "rule", "schema", "major", "minor"});
      pl::ProofLine line;
      guard(l.at("formula"), [&] { line.formula = pl::parse_pl(l.at("formula").str()); });
      line.rule = l.at("rule").str();
      if (auto s = l.find("schema")) line.schema = s->str();
      if (auto m = l.find("major")) line.major = m->index();
      if (auto m = l.find("minor")) line.minor = m->index();
      pr.lines.push_back(std::move(line));
    }
    p_.proofs.emplace(name, std::move(pr));
  }

  Node root_;
  Project p_;
  std::map<std::string, std::map<std::string, std::string>> sites_;
};

}  // namespace detail

inline Project load_project_json(const json& doc) { return detail::Loader(doc).load(); }

inline Project load_project_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProjectError("json_error", "", std::string("malformed JSON: ") + e.what());
  }
  return load_project_json(doc);
}

inline Project load_project(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProjectError("io_error", "", "cannot read `" + path + "`");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_project_text(ss.str());
}

}  // namespace toposlang::project
