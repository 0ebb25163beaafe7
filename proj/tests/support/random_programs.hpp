#pragma once

// Random positive-program generation shared by the engine tests and the
// acceptance suite, plus the bridge from the oracle representation to the
// engine's rule and store types.

#include <random>

#include "reclift/engine.hpp"
#include "support/datalog_oracle.hpp"

namespace reclift::testgen {

struct OProgram {
  std::vector<ORule> rules;
  ODb edb;
  int domain = 4;
  std::vector<std::string> rels;  // rel name -> arity via arity map
  std::map<std::string, int> arity;
};

inline OProgram random_program(std::mt19937_64& rng, int max_rels = 3,
                               int max_rules = 4, int max_facts = 8,
                               int domain = 4) {
  OProgram p;
  p.domain = domain;
  std::uniform_int_distribution<int> nrels(2, max_rels);
  int r = nrels(rng);
  for (int i = 0; i < r; ++i) {
    std::string name = "r" + std::to_string(i);
    p.rels.push_back(name);
    p.arity[name] = 1 + static_cast<int>(rng() % 2);
  }
  auto rand_rel = [&] { return p.rels[rng() % p.rels.size()]; };
  auto rand_atom = [&](int nvars) {
    OAtom a;
    a.rel = rand_rel();
    for (int i = 0; i < p.arity[a.rel]; ++i) {
      if (rng() % 3 == 0)
        a.terms.push_back(static_cast<int>(rng() % domain));
      else
        a.terms.push_back(-1 - static_cast<int>(rng() % nvars));
    }
    return a;
  };
  int nrules = 1 + static_cast<int>(rng() % max_rules);
  for (int i = 0; i < nrules; ++i) {
    int nvars = 1 + static_cast<int>(rng() % 3);
    ORule rule;
    rule.head = rand_atom(nvars);
    int nbody = 1 + static_cast<int>(rng() % 2);
    for (int j = 0; j < nbody; ++j) rule.body.push_back(rand_atom(nvars));
    // Range restriction: every head variable must occur in the body.
    bool ok = true;
    for (int t : rule.head.terms) {
      if (t >= 0) continue;
      bool found = false;
      for (const auto& b : rule.body)
        for (int bt : b.terms)
          if (bt == t) found = true;
      if (!found) ok = false;
    }
    if (ok) p.rules.push_back(rule);
  }
  int nfacts = 1 + static_cast<int>(rng() % max_facts);
  for (int i = 0; i < nfacts; ++i) {
    std::string rel = rand_rel();
    OTuple t;
    for (int j = 0; j < p.arity[rel]; ++j)
      t.push_back(static_cast<int>(rng() % domain));
    p.edb[rel].insert(t);
  }
  return p;
}

inline Tuple to_tuple(const OTuple& t) {
  Tuple out;
  out.reserve(t.size());
  for (int v : t) out.push_back(Value::integer(v));
  return out;
}

inline OTuple from_tuple(const Tuple& t) {
  OTuple out;
  out.reserve(t.size());
  for (const auto& v : t) out.push_back(static_cast<int>(v.as_int()));
  return out;
}

inline void declare_oprogram(const OProgram& p, Store& store) {
  for (const auto& rel : p.rels) {
    RelationSchema s;
    s.name = rel;
    for (int i = 0; i < p.arity.at(rel); ++i)
      s.columns.push_back(Column{"c" + std::to_string(i), ValueTag::Int, {}});
    store.declare(std::move(s));
  }
}

inline void seed_edb(const OProgram& p, Store& store) {
  for (const auto& [rel, tuples] : p.edb)
    for (const auto& t : tuples) store.insert_extensional(rel, to_tuple(t));
}

// Converts oracle rules to an engine pass. All relations are inputs and all
// head relations outputs.
inline Pass to_pass(const OProgram& p, const std::string& name = "random") {
  std::vector<Rule> rules;
  int counter = 0;
  for (const auto& orule : p.rules) {
    RuleBuilder rb(name + "_rule" + std::to_string(counter++));
    std::map<int, Var> vars;
    auto term_of = [&](int t) -> Term {
      if (t >= 0) return Term(Value::integer(t));
      auto it = vars.find(t);
      if (it == vars.end())
        it = vars.emplace(t, rb.var("X" + std::to_string(-t))).first;
      return Term(it->second);
    };
    // Build body matches first so head variables are bound.
    std::vector<std::pair<std::string, std::vector<Term>>> matches;
    for (const auto& b : orule.body) {
      std::vector<Term> args;
      for (int t : b.terms) args.push_back(term_of(t));
      matches.emplace_back(b.rel, std::move(args));
    }
    std::vector<Term> head_args;
    for (int t : orule.head.terms) head_args.push_back(term_of(t));
    for (auto& [rel, args] : matches) rb.match(rel, std::move(args));
    rb.derive(orule.head.rel, std::move(head_args));
    rules.push_back(rb.build());
  }
  std::set<std::string> inputs(p.rels.begin(), p.rels.end());
  std::set<std::string> outputs;
  for (const auto& r : p.rules) outputs.insert(r.head.rel);
  if (outputs.empty()) outputs.insert(p.rels.front());
  return make_pass(name, std::move(inputs), std::move(outputs),
                   std::move(rules));
}

}  // namespace reclift::testgen
