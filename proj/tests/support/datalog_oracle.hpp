#pragma once

// Independent brute-force oracles for positive Datalog programs over small
// integer domains. Deliberately separate from the engine: naive saturation
// and direct derivation-tree counting, used to cross-check engine results.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace reclift::testgen {

// Term encoding: values >= 0 are domain constants, values < 0 are variables.
struct OAtom {
  std::string rel;
  std::vector<int> terms;
};

struct ORule {
  OAtom head;
  std::vector<OAtom> body;
};

using OTuple = std::vector<int>;
using ODb = std::map<std::string, std::set<OTuple>>;

// Variables occurring in the rule, deduplicated. Substitutions range over
// exactly these; a variable id that appears nowhere is not a variable.
inline std::vector<int> rule_vars(const ORule& r) {
  std::set<int> vars;
  auto scan = [&vars](const OAtom& a) {
    for (int t : a.terms)
      if (t < 0) vars.insert(t);
  };
  scan(r.head);
  for (const auto& b : r.body) scan(b);
  return {vars.begin(), vars.end()};
}

// All ground instantiations of a rule over the constant domain [0, domain).
template <class Fn>
void for_each_instance(const ORule& r, int domain, Fn&& fn) {
  auto vars = rule_vars(r);
  size_t nvars = vars.size();
  std::map<int, size_t> slot;
  for (size_t i = 0; i < nvars; ++i) slot[vars[i]] = i;
  std::vector<int> sub(nvars, 0);
  auto ground = [&](const OAtom& a) {
    OTuple t;
    t.reserve(a.terms.size());
    for (int term : a.terms)
      t.push_back(term >= 0 ? term : sub[slot.at(term)]);
    return t;
  };
  while (true) {
    std::vector<std::pair<std::string, OTuple>> body;
    body.reserve(r.body.size());
    for (const auto& b : r.body) body.emplace_back(b.rel, ground(b));
    fn(std::make_pair(r.head.rel, ground(r.head)), body);
    size_t i = 0;
    for (; i < nvars; ++i) {
      if (++sub[i] < domain) break;
      sub[i] = 0;
    }
    if (i == nvars) break;
  }
}

// Naive Boolean saturation to fixpoint.
inline ODb bool_saturate(const std::vector<ORule>& rules, ODb db, int domain) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : rules) {
      for_each_instance(r, domain, [&](const auto& head, const auto& body) {
        for (const auto& [rel, t] : body) {
          auto it = db.find(rel);
          if (it == db.end() || !it->second.count(t)) return;
        }
        if (db[head.first].insert(head.second).second) changed = true;
      });
    }
  }
  return db;
}

// Number of derivation trees per fact (a tree of height 0 is an EDB fact).
// Returns nullopt if the counts have not stabilized by max_height, which
// signals an infinite derivation family.
inline std::optional<std::map<std::pair<std::string, OTuple>, uint64_t>>
count_derivations(const std::vector<ORule>& rules, const ODb& edb, int domain,
                  int max_height = 40) {
  using Key = std::pair<std::string, OTuple>;
  std::map<Key, uint64_t> cur;
  for (const auto& [rel, tuples] : edb)
    for (const auto& t : tuples) cur[{rel, t}] = 1;
  for (int h = 0; h < max_height; ++h) {
    std::map<Key, uint64_t> next;
    for (const auto& [rel, tuples] : edb)
      for (const auto& t : tuples) next[{rel, t}] = 1;
    for (const auto& r : rules) {
      for_each_instance(r, domain, [&](const Key& head, const auto& body) {
        uint64_t prod = 1;
        for (const auto& [rel, t] : body) {
          auto it = cur.find({rel, t});
          if (it == cur.end() || it->second == 0) {
            prod = 0;
            break;
          }
          prod *= it->second;
        }
        if (prod) next[head] += prod;
      });
    }
    if (next == cur) return cur;
    cur = std::move(next);
  }
  return std::nullopt;
}

}  // namespace reclift::testgen
