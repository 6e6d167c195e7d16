#pragma once
// Command-line front end. Every command writes one canonical JSON document
// (sorted keys) to `out` and a one-line summary to `err`.
// Exit codes: 0 ok/valid, 1 well-formed input with a negative verdict, 2 input error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "toposlang/project.hpp"

namespace toposlang::cli {

using nlohmann::json;

enum Exit : int { kOk = 0, kNegative = 1, kInputError = 2 };

struct Result {
  int code = kOk;
  json body;
  std::string summary;
};

// --- JSON views --------------------------------------------------------------------------

inline json countermodel_json(const pl::KripkeModel& m) {
  json order = json::array(), val = json::object();
  for (std::size_t w = 0; w < m.worlds; ++w)
    for (std::size_t v = 0; v < m.worlds; ++v)
      if (w != v && (m.above[w] >> v & 1)) order.push_back({w, v});
  for (const auto& [atom, set] : m.valuation) {
    json ws = json::array();
    for (std::size_t w = 0; w < m.worlds; ++w)
      if (set >> w & 1) ws.push_back(w);
    val[atom] = ws;
  }
  return {{"worlds", m.worlds}, {"root", 0}, {"order", order}, {"valuation", val}};
}

inline json formula_ast(const pl::FormulaPtr& f) {
  using K = pl::Formula::Kind;
  switch (f->kind) {
    case K::Atom: {
      json j{{"kind", "atom"}, {"name", f->name}};
      if (f->range) j["range"] = f->range->str();
      return j;
    }
    case K::Not: return {{"kind", "not"}, {"arg", formula_ast(f->lhs)}};
    case K::And: return {{"kind", "and"}, {"lhs", formula_ast(f->lhs)}, {"rhs", formula_ast(f->rhs)}};
    case K::Or: return {{"kind", "or"}, {"lhs", formula_ast(f->lhs)}, {"rhs", formula_ast(f->rhs)}};
    case K::Implies: return {{"kind", "implies"}, {"lhs", formula_ast(f->lhs)}, {"rhs", formula_ast(f->rhs)}};
  }
  return {};
}

inline json verdict_json(const pl::ProofVerdict& v) {
  json j{{"accepted", v.accepted}, {"schemas", v.schemas}};
  if (!v.accepted) j["error"] = {{"line", v.line}, {"message", v.message}};
  return j;
}

inline json law_json(const heyting::LawReport& r) {
  json vs = json::array();
  for (std::size_t i = 0; i < r.violations.size() && i < 10; ++i)
    vs.push_back({{"law", r.violations[i].law}, {"elements", r.violations[i].elements}});
  return {{"ok", r.ok()},
          {"exhaustive", r.exhaustive},
          {"checks", r.checks},
          {"violations", r.violation_count},
          {"examples", vs}};
}

inline json axiom_report_json(const rep::AxiomReport& r) {
  json fs = json::array();
  for (const auto& f : r.failures) {
    json w = json::object();
    for (const auto& [v, l] : f.witness) w[v] = l;
    fs.push_back({{"axiom", f.axiom}, {"sequent", f.sequent}, {"stage", f.stage}, {"witness", w}});
  }
  return {{"ok", r.ok()}, {"checks", r.checks}, {"failures", fs}};
}

inline json arrow_json(const topos::NatTransform& n) {
  const auto& C = n.source().base();
  json j = json::object();
  for (cat::ObjId a = 0; a < C.num_objects(); ++a) {
    json st = json::object();
    for (topos::Elem x = 0; x < n.source().size(a); ++x) st[n.source().label(a, x)] = n.target().label(a, n.at(a, x));
    j[C.object(a)] = st;
  }
  return j;
}

// --- commands ----------------------------------------------------------------------------

inline Result cmd_validate(const std::string& file, std::uint64_t seed) {
  const auto p = project::load_project(file);
  Result r;
  json checks = json::object();
  bool ok = true;
  heyting::LawCheckOptions opt;
  opt.seed = seed;
  for (const auto& [name, C] : p.categories) {
    const auto rep = cat::validate_category(*C);
    checks["categories"][name] = {{"ok", rep.ok()}, {"objects", C->num_objects()}, {"morphisms", C->num_morphisms()}};
  }
  for (const auto& [name, A] : p.algebras) {
    const auto rep = heyting::check_heyting_laws(*A.algebra, opt);
    ok = ok && rep.ok();
    auto j = law_json(rep);
    j["kind"] = A.kind;
    j["size"] = A.algebra->size();
    checks["algebras"][name] = j;
  }
  for (const auto& [name, sys] : p.systems) {
    const auto rep = pl::check_optional_axioms(sys, 200, seed);
    ok = ok && rep.ok();
    checks["systems"][name] = {{"states", sys.states.size()}, {"quantities", sys.quantities.size()},
                               {"optional_axioms", {{"ok", rep.ok()}, {"checks", rep.checks}, {"failures", rep.failures.size()}}}};
  }
  for (const auto& [name, R] : p.representations) {
    const auto rep = rep::validate_axioms(*R.rep, R.axioms);
    ok = ok && rep.ok();
    auto j = axiom_report_json(rep);
    j["kind"] = R.kind;
    j["packs"] = R.packs;
    checks["representations"][name] = j;
  }
  for (const auto& [name, f] : p.formulas) checks["formulas"][name] = pl::to_string(f.formula);
  for (const auto& [name, t] : p.terms)
    checks["terms"][name] = {{"term", ls::to_string(t.term)}, {"type", ls::to_string(t.type)}};
  for (const auto& [name, pr] : p.proofs) {
    const auto v = pl::check_proof(pr);
    ok = ok && v.accepted;
    checks["proofs"][name] = verdict_json(v);
  }
  r.body = {{"command", "validate"}, {"file", file}, {"ok", ok}, {"checks", checks}, {"notes", p.notes}};
  r.code = ok ? kOk : kNegative;
  r.summary = std::string(ok ? "valid" : "loaded, but some checks failed") + ": " + file;
  return r;
}

inline Result cmd_omega(const std::string& file, const std::string& category) {
  const auto p = project::load_project(file);
  const auto& C = *project::Project::lookup(p.categories, category, "category");
  const auto& T = p.topos_of(category);
  json stages = json::object(), maps = json::object();
  bool boolean = true;
  for (cat::ObjId a = 0; a < C.num_objects(); ++a) {
    const cat::SieveAlgebra H(C, a);
    const auto fails = heyting::excluded_middle_failures(H);
    boolean = boolean && fails.empty();
    json witness = fails.empty() ? json(nullptr) : json(H.label(fails.front()));
    stages[C.object(a)] = {{"sieves", T.omega().labels(a)},
                           {"top", T.omega().label(a, T.top(a))},
                           {"bottom", T.omega().label(a, T.bottom(a))},
                           {"heyting_laws", law_json(heyting::check_heyting_laws(H))},
                           {"excluded_middle_witness", witness}};
  }
  for (cat::MorId f = 0; f < C.num_morphisms(); ++f) {
    json m = json::object();
    const auto a = C.cod(f), b = C.dom(f);
    for (topos::Elem s = 0; s < T.omega().size(a); ++s) m[T.omega().label(a, s)] = T.omega().label(b, T.omega().restrict(f, s));
    maps[C.name(f)] = m;
  }
  Result r;
  r.body = {{"command", "omega"}, {"category", category}, {"stages", stages}, {"restrictions", maps}, {"boolean", boolean}};
  r.summary = "Omega over " + category + ": " + std::to_string(T.omega().total_size()) + " sieves" +
              (boolean ? " (Boolean)" : " (not Boolean)");
  return r;
}

inline Result cmd_sub_classify(const std::string& file, const std::string& presheaf) {
  const auto p = project::load_project(file);
  const auto& [cname, X] = project::Project::lookup(p.presheaves, presheaf, "presheaf");
  const auto& T = p.topos_of(cname);
  const auto subs = T.subobjects(X);
  const auto homs = T.count_hom(X, T.omega());
  json list = json::array();
  bool ok = subs.size() == homs;
  for (const auto& K : subs) {
    const auto chi = T.characteristic(K);
    const bool back = T.subobject_of(chi) == K;
    ok = ok && back;
    list.push_back({{"subobject", topos::subobject_label(K)}, {"characteristic", arrow_json(chi)}, {"round_trip", back}});
  }
  Result r;
  r.body = {{"command", "sub classify"}, {"presheaf", presheaf}, {"category", cname}, {"subobjects", list},
            {"count_sub", subs.size()}, {"count_hom_to_omega", homs}, {"bijection", ok}};
  r.code = ok ? kOk : kNegative;
  r.summary = "Sub(" + presheaf + ") has " + std::to_string(subs.size()) + " elements, Hom(" + presheaf +
              ", Omega) has " + std::to_string(homs);
  return r;
}

inline Result cmd_pl_parse(const std::string& text) {
  const auto [f, normalized] = pl::parse_pl_noting_normalization(text);
  json atoms = json::array();
  for (const auto& a : pl::atoms_of(f)) atoms.push_back(pl::to_string(a));
  Result r;
  r.body = {{"command", "pl parse"}, {"formula", pl::to_string(f)}, {"normalized", normalized}, {"atoms", atoms},
            {"ast", formula_ast(f)}};
  r.summary = pl::to_string(f);
  return r;
}

/// `--formula NAME` from the project or `--text` given inline.
inline pl::FormulaPtr formula_arg(const project::Project& p, const std::string& name, const std::string& text) {
  if (!name.empty()) return project::Project::lookup(p.formulas, name, "formula").formula;
  if (text.empty()) throw InvalidStructureError("give --formula NAME or --text FORMULA");
  return pl::parse_pl(text);
}

inline Result cmd_pl_represent(const std::string& file, const std::string& fname, const std::string& text,
                               const std::string& system, const std::string& algebra,
                               const std::vector<std::string>& assign) {
  const auto p = project::load_project(file);
  const auto f = formula_arg(p, fname, text);
  Result r;
  r.body = {{"command", "pl represent"}, {"formula", pl::to_string(f)}};
  if (!system.empty()) {
    const auto& sys = project::Project::lookup(p.systems, system, "system");
    const auto set = pl::classical_represent(f, sys);
    json states = json::array();
    for (auto s : bitset_members(set)) states.push_back(sys.states[s]);
    r.body["system"] = system;
    r.body["states"] = states;
    r.summary = pl::to_string(f) + " holds in " + set_label(set, sys.states);
    return r;
  }
  if (algebra.empty()) throw InvalidStructureError("give --system NAME or --algebra NAME");
  const auto& A = *project::Project::lookup(p.algebras, algebra, "algebra").algebra;
  std::map<std::string, heyting::ElemId> table;
  for (const auto& a : assign) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw InvalidStructureError("assignment `" + a + "` is not ATOM=ELEMENT");
    table[pl::to_string(pl::parse_pl(a.substr(0, eq)))] = A.find(a.substr(eq + 1));
  }
  const auto v = pl::pl_represent(f, A, table);
  r.body["algebra"] = algebra;
  r.body["value"] = A.label(v);
  r.body["is_top"] = v == A.top();
  r.summary = pl::to_string(f) + " = " + A.label(v) + " in " + algebra;
  return r;
}

inline Result cmd_pl_truth(const std::string& file, const std::string& fname, const std::string& text,
                           const std::string& system, const std::string& state) {
  const auto p = project::load_project(file);
  const auto f = formula_arg(p, fname, text);
  const auto& sys = project::Project::lookup(p.systems, system, "system");
  const bool v = pl::truth_value(f, state, sys);
  Result r;
  r.body = {{"command", "pl truth"}, {"formula", pl::to_string(f)}, {"system", system}, {"state", state}, {"truth", v}};
  r.summary = pl::to_string(f) + (v ? " is true" : " is false") + " at " + state;
  return r;
}

inline Result cmd_pl_decide(const std::string& text) {
  const auto f = pl::parse_pl(text);
  const auto v = pl::decide_ipc(f);
  Result r;
  r.body = {{"command", "pl decide"}, {"formula", pl::to_string(f)}, {"valid", v.valid}};
  if (v.countermodel) r.body["countermodel"] = countermodel_json(*v.countermodel);
  r.code = v.valid ? kOk : kNegative;
  r.summary = pl::to_string(f) + (v.valid ? " is intuitionistically valid"
                                          : v.countermodel ? " is not valid; countermodel with " +
                                                                 std::to_string(v.countermodel->worlds) + " worlds"
                                                           : " is not valid");
  return r;
}

inline Result cmd_pl_prove(const std::string& file, const std::string& proof, const std::string& identity) {
  pl::HilbertProof pr;
  if (!identity.empty()) {
    pr = pl::identity_proof(pl::parse_pl(identity));
  } else {
    if (file.empty() || proof.empty()) throw InvalidStructureError("give FILE --proof NAME, or --identity FORMULA");
    const auto p = project::load_project(file);
    pr = project::Project::lookup(p.proofs, proof, "proof");
  }
  const auto v = pl::check_proof(pr);
  json lines = json::array();
  for (const auto& l : pr.lines) {
    json j{{"formula", pl::to_string(l.formula)}, {"rule", l.rule}};
    if (l.rule == "mp") j["from"] = {l.major, l.minor};
    lines.push_back(j);
  }
  Result r;
  r.body = verdict_json(v);
  r.body["command"] = "pl prove";
  r.body["lines"] = lines;
  r.code = v.accepted ? kOk : kNegative;
  r.summary = v.accepted ? "proof accepted" : "proof rejected at line " + std::to_string(v.line) + ": " + v.message;
  return r;
}

inline ls::VarContext parse_vars(const std::vector<std::string>& vars) {
  ls::VarContext ctx;
  for (const auto& v : vars) {
    const auto c = v.find(':');
    if (c == std::string::npos) throw InvalidStructureError("variable `" + v + "` is not NAME:TYPE");
    auto name = v.substr(0, c);
    name.erase(std::remove_if(name.begin(), name.end(), ::isspace), name.end());
    ctx[name] = ls::parse_ls_type(v.substr(c + 1));
  }
  return ctx;
}

/// The term to work on and its context: `--term NAME` or `--text` with `--var`s.
inline std::pair<std::string, ls::VarContext> term_arg(const project::Project& p, const std::string& name,
                                                       const std::string& text, const std::vector<std::string>& vars) {
  if (!name.empty()) {
    const auto& e = project::Project::lookup(p.terms, name, "term");
    auto ctx = e.context;
    for (const auto& [x, t] : parse_vars(vars)) ctx[x] = t;
    return {e.text, ctx};
  }
  if (text.empty()) throw InvalidStructureError("give --term NAME or --text TERM");
  return {text, parse_vars(vars)};
}

inline Result cmd_ls_typecheck(const std::string& file, const std::string& signature, const std::string& rep_name,
                               const std::string& tname, const std::string& text, const std::vector<std::string>& vars) {
  const auto p = project::load_project(file);
  const ls::Signature* sig = nullptr;
  if (!rep_name.empty()) sig = &project::Project::lookup(p.representations, rep_name, "representation").rep->signature();
  else if (!signature.empty()) sig = &project::Project::lookup(p.signatures, signature, "signature");
  else if (!tname.empty()) sig = &project::Project::lookup(p.signatures, project::Project::lookup(p.terms, tname, "term").signature, "signature");
  else throw InvalidStructureError("give --signature NAME or --rep NAME");
  const auto [src, ctx] = term_arg(p, tname, text, vars);
  const auto t = ls::parse_ls(src, *sig, ctx);
  const auto ty = ls::infer_type(t, *sig, ctx);
  json fv = json::object();
  for (const auto& [x, xt] : ls::free_vars(t)) fv[x] = ls::to_string(xt);
  Result r;
  r.body = {{"command", "ls typecheck"}, {"term", ls::to_string(t)}, {"type", ls::to_string(ty)},
            {"desugared", ls::to_string(ls::desugar(t))}, {"free_variables", fv}};
  r.summary = ls::to_string(t) + " : " + ls::to_string(ty);
  return r;
}

inline Result cmd_ls_represent(const std::string& file, const std::string& rep_name, const std::string& tname,
                               const std::string& text, const std::vector<std::string>& vars) {
  const auto p = project::load_project(file);
  const auto& R = *project::Project::lookup(p.representations, rep_name, "representation").rep;
  const auto [src, ctx] = term_arg(p, tname, text, vars);
  const auto t = ls::parse_ls(src, R.signature(), ctx);
  const auto ty = ls::infer_type(t, R.signature(), ctx);
  // only the variables the term uses enter the context object
  const auto used = rep::context_of(ls::free_vars(t));
  const auto arrow = rep::interpret_term(t, used, R);
  json cj = json::array();
  for (const auto& [x, xt] : used) cj.push_back({x, ls::to_string(xt)});
  Result r;
  r.body = {{"command", "ls represent"}, {"representation", rep_name}, {"term", ls::to_string(t)},
            {"type", ls::to_string(ty)}, {"context", cj}, {"arrow", arrow_json(arrow)}};
  if (used.empty()) {
    json g = json::object();
    for (cat::ObjId a = 0; a < R.topos().base().num_objects(); ++a)
      g[R.topos().base().object(a)] = arrow.target().label(a, arrow.at(a, 0));
    r.body["global_element"] = g;
  }
  r.summary = "represented " + ls::to_string(t) + " : " + ls::to_string(ty) + " in " + rep_name;
  return r;
}

inline Result cmd_ls_check_axioms(const std::string& file, const std::string& rep_name, const std::vector<std::string>& packs) {
  const auto p = project::load_project(file);
  const auto& R = project::Project::lookup(p.representations, rep_name, "representation");
  auto axioms = R.axioms;
  std::vector<std::string> names = R.packs;
  for (const auto& n : packs) {
    const auto& pack = project::Project::lookup(p.axiom_packs, n, "axiom pack");
    axioms.insert(axioms.end(), pack.axioms.begin(), pack.axioms.end());
    names.push_back(n);
  }
  const auto rep = rep::validate_axioms(*R.rep, axioms);
  Result r;
  r.body = axiom_report_json(rep);
  r.body["command"] = "ls check-axioms";
  r.body["representation"] = rep_name;
  r.body["packs"] = names;
  r.body["axioms"] = axioms.size();
  r.code = rep.ok() ? kOk : kNegative;
  r.summary = rep.ok() ? std::to_string(axioms.size()) + " axioms hold in " + rep_name
                       : "axiom `" + rep.failures.front().axiom + "` fails in " + rep_name;
  return r;
}

inline Result cmd_demo_excluded_middle() {
  json out = json::object();
  const auto P = heyting::powerset_algebra({"1", "2", "3"});
  out["powerset"] = {{"points", P.points()}, {"holds", heyting::excluded_middle_failures(P).empty()}};
  auto witness = [](const heyting::HeytingAlgebra& H) -> json {
    const auto fails = heyting::excluded_middle_failures(H);
    if (fails.empty()) return {{"holds", true}};
    const auto a = fails.front();
    return {{"holds", false},
            {"witness", H.label(a)},
            {"negation", H.label(H.negate(a))},
            {"join", H.label(H.join(a, H.negate(a)))},
            {"top", H.label(H.top())}};
  };
  out["sierpinski"] = witness(heyting::open_set_algebra({"0", "1"}, {{}, {"1"}, {"0", "1"}}));
  const auto C = cat::FiniteCategory::from_poset(Poset({"p", "q"}, {{"p", "q"}}));
  out["omega_q"] = witness(cat::SieveAlgebra(C, C.object_index("q")));
  Result r;
  r.body = {{"command", "demo excluded-middle"}, {"instances", out}};
  r.summary = "excluded middle holds for powersets and fails in the Sierpinski space and in Omega_q";
  return r;
}

inline Result cmd_demo_nondistributivity() {
  const auto d = pl::quantum_nondistributivity_demo();
  Result r;
  r.body = {{"command", "demo nondistributivity"},
            {"a", d.a},
            {"b", d.b},
            {"c", d.c},
            {"b_join_c", d.b_join_c},
            {"a_meet_b", d.a_meet_b},
            {"a_meet_c", d.a_meet_c},
            {"lhs", d.lhs},
            {"rhs", d.rhs},
            {"distributivity_fails", d.distributivity_fails},
            {"consequence", d.consequence}};
  r.summary = "a & (b | c) = " + d.lhs + " but (a & b) | (a & c) = " + d.rhs;
  return r;
}

// --- dispatch ----------------------------------------------------------------------------

inline json error_json(const std::string& kind, const std::string& message) {
  return {{"error", {{"kind", kind}, {"message", message}}}};
}

/// Runs the CLI on `args` (args[0] is the program name).
inline int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite Heyting algebras, presheaf toposes and the languages PL(S) and L(S)", "toposlang"};
  app.require_subcommand(1);
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "seed for every randomized check")->capture_default_str();
  app.fallthrough();

  std::string file, name, text, system, state, algebra, category, presheaf, proof, identity, signature, rep_name;
  std::vector<std::string> assign, vars, packs;
  std::function<Result()> action;

  auto* validate = app.add_subcommand("validate", "load a project file and run every check on it");
  validate->add_option("file", file)->required();
  validate->callback([&] { action = [&] { return cmd_validate(file, seed); }; });

  auto* omega = app.add_subcommand("omega", "the subobject classifier of a category's presheaf topos");
  omega->add_option("file", file)->required();
  omega->add_option("--category", category)->required();
  omega->callback([&] { action = [&] { return cmd_omega(file, category); }; });

  auto* sub = app.add_subcommand("sub", "subobjects");
  sub->require_subcommand(1);
  auto* classify = sub->add_subcommand("classify", "Sub(X) against Hom(X, Omega)");
  classify->add_option("file", file)->required();
  classify->add_option("--presheaf", presheaf)->required();
  classify->callback([&] { action = [&] { return cmd_sub_classify(file, presheaf); }; });

  auto* pl = app.add_subcommand("pl", "the propositional language PL(S)");
  pl->require_subcommand(1);
  auto* parse = pl->add_subcommand("parse", "parse and print a formula");
  parse->add_option("formula", text)->required();
  parse->callback([&] { action = [&] { return cmd_pl_parse(text); }; });
  auto* represent = pl->add_subcommand("represent", "value of a formula in a system or an algebra");
  represent->add_option("file", file)->required();
  represent->add_option("--formula", name);
  represent->add_option("--text", text);
  represent->add_option("--system", system);
  represent->add_option("--algebra", algebra);
  represent->add_option("--assign", assign, "ATOM=ELEMENT, repeatable");
  represent->callback([&] { action = [&] { return cmd_pl_represent(file, name, text, system, algebra, assign); }; });
  auto* truth = pl->add_subcommand("truth", "truth value of a formula at a state");
  truth->add_option("file", file)->required();
  truth->add_option("--formula", name);
  truth->add_option("--text", text);
  truth->add_option("--system", system)->required();
  truth->add_option("--state", state)->required();
  truth->callback([&] { action = [&] { return cmd_pl_truth(file, name, text, system, state); }; });
  auto* decide = pl->add_subcommand("decide", "intuitionistic validity, with a countermodel when invalid");
  decide->add_option("formula", text)->required();
  decide->callback([&] { action = [&] { return cmd_pl_decide(text); }; });
  auto* prove = pl->add_subcommand("prove", "check a Hilbert-style proof");
  prove->add_option("file", file);
  prove->add_option("--proof", proof);
  prove->add_option("--identity", identity, "check the built-in proof of F -> F");
  prove->callback([&] { action = [&] { return cmd_pl_prove(file, proof, identity); }; });

  auto* ls = app.add_subcommand("ls", "the local language L(S)");
  ls->require_subcommand(1);
  auto* typecheck = ls->add_subcommand("typecheck", "type of a term");
  typecheck->add_option("file", file)->required();
  typecheck->add_option("--signature", signature);
  typecheck->add_option("--rep", rep_name);
  typecheck->add_option("--term", name);
  typecheck->add_option("--text", text);
  typecheck->add_option("--var", vars, "NAME:TYPE, repeatable");
  typecheck->callback([&] { action = [&] { return cmd_ls_typecheck(file, signature, rep_name, name, text, vars); }; });
  auto* lrep = ls->add_subcommand("represent", "interpret a term as an arrow");
  lrep->add_option("file", file)->required();
  lrep->add_option("--rep", rep_name)->required();
  lrep->add_option("--term", name);
  lrep->add_option("--text", text);
  lrep->add_option("--var", vars, "NAME:TYPE, repeatable");
  lrep->callback([&] { action = [&] { return cmd_ls_represent(file, rep_name, name, text, vars); }; });
  auto* axioms = ls->add_subcommand("check-axioms", "validate a representation's axioms");
  axioms->add_option("file", file)->required();
  axioms->add_option("--rep", rep_name)->required();
  axioms->add_option("--pack", packs, "extra axiom pack, repeatable");
  axioms->callback([&] { action = [&] { return cmd_ls_check_axioms(file, rep_name, packs); }; });

  auto* demo = app.add_subcommand("demo", "the two headline demonstrations");
  demo->require_subcommand(1);
  demo->add_subcommand("excluded-middle", "excluded middle across algebras")->callback([&] {
    action = cmd_demo_excluded_middle;
  });
  demo->add_subcommand("nondistributivity", "rays in the rational plane")->callback([&] {
    action = cmd_demo_nondistributivity;
  });

  auto emit = [&](const json& body) { out << body.dump(2) << "\n"; };
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    emit(error_json("usage", e.what()));
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  try {
    const auto r = action();
    emit(r.body);
    err << r.summary << "\n";
    return r.code;
  } catch (const project::ProjectError& e) {
    auto j = error_json(e.kind(), e.what());
    j["error"]["pointer"] = e.pointer();
    emit(j);
    err << "error: " << e.what() << "\n";
  } catch (const ParseError& e) {
    auto j = error_json(e.kind(), e.what());
    j["error"]["position"] = e.position();
    emit(j);
    err << "error: " << e.what() << "\n";
  } catch (const TypeError& e) {
    auto j = error_json(e.kind(), e.what());
    j["error"]["subterm"] = e.subterm();
    emit(j);
    err << "error: " << e.what() << "\n";
  } catch (const Error& e) {
    emit(error_json(e.kind(), e.what()));
    err << "error: " << e.what() << "\n";
  }
  return kInputError;
}

}  // namespace toposlang::cli
