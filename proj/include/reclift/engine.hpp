#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "reclift/store.hpp"

namespace reclift {

struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Var {
  int slot = -1;
};

// Bound variable values during one rule instantiation.
class RuleEnv {
 public:
  explicit RuleEnv(size_t n) : vals_(n), bound_(n, 0) {}
  const Value& operator[](Var v) const {
    if (v.slot < 0 || static_cast<size_t>(v.slot) >= vals_.size() ||
        !bound_[v.slot])
      throw EngineError("unbound variable in rule evaluation");
    return vals_[v.slot];
  }
  bool is_bound(Var v) const {
    return v.slot >= 0 && static_cast<size_t>(v.slot) < vals_.size() &&
           bound_[v.slot];
  }

 private:
  friend class RuleEval;
  std::vector<Value> vals_;
  std::vector<char> bound_;
};

using ComputeFn = std::function<Value(const RuleEnv&)>;
using GuardFn = std::function<bool(const RuleEnv&)>;

// Rule term: a variable or a constant.
struct Term {
  Term(Var v) : var(v) {}                       // NOLINT: implicit by design
  Term(Value c) : constant(std::move(c)) {}     // NOLINT
  std::optional<Var> var;
  std::optional<Value> constant;
};

struct AtomPat {
  std::string rel;
  std::vector<Term> args;
};

struct MatchStep {
  AtomPat atom;
};
struct ComputeStep {
  Var out;
  ComputeFn fn;
  std::string note;
};
struct GuardStep {
  GuardFn fn;
  std::string note;
};
using RuleStep = std::variant<MatchStep, ComputeStep, GuardStep>;

// A positive rule with computed premises and guards, evaluated left to right
// as written.
struct Rule {
  std::string id;
  std::vector<RuleStep> steps;
  AtomPat head;
  size_t var_count = 0;
  std::vector<std::string> var_names;

  std::string describe() const;
};

class RuleBuilder {
 public:
  explicit RuleBuilder(std::string id) { rule_.id = std::move(id); }

  Var var(std::string name);
  RuleBuilder& match(std::string rel, std::vector<Term> args);
  RuleBuilder& bind(Var out, ComputeFn fn, std::string note = "computed");
  RuleBuilder& when(GuardFn fn, std::string note = "guard");
  RuleBuilder& derive(std::string rel, std::vector<Term> args);
  Rule build();

 private:
  Rule rule_;
  bool has_head_ = false;
};

struct Firing {
  std::string rule_id;
  std::string rel;
  Tuple head;
  std::vector<std::pair<std::string, Tuple>> body;
};

// Chronological log of rule firings, deduplicated per instance. Off by
// default; required for witness reconstruction.
class WitnessLog {
 public:
  void record(Firing f);
  const Firing* first_for(const std::string& rel, const Tuple& t) const;
  size_t size() const { return entries_.size(); }
  const std::vector<Firing>& entries() const { return entries_; }

 private:
  std::vector<Firing> entries_;
  std::set<std::string> seen_;
  std::map<std::pair<std::string, std::string>, size_t> first_;
};

struct EngineConfig {
  enum class Strategy { SemiNaive, Naive };
  Strategy strategy = Strategy::SemiNaive;
  size_t iteration_limit = 1000000;
  // Extra rounds allowed after tuple support stabilizes while annotations
  // still change (capped polynomials can oscillate in diversity).
  int annotation_settle_iters = 3;
  bool collect_firings = false;
  // Snapshot the store before each pass and verify leq(before, after).
  bool check_monotonic = false;
};

struct PassContext {
  Store& store;
  CTypeTable& types;
  EngineConfig config;
  WitnessLog* log = nullptr;

  // Insert helper for procedural passes: annotation is the product of the
  // justification facts' annotations (one(mode) when none), merged with lub
  // so reruns are no-ops; logs a firing when the log is enabled.
  bool derive(const std::string& pass_name, const std::string& rel, Tuple t,
              const std::vector<std::pair<std::string, Tuple>>& because = {});
};

struct Pass {
  std::string name;
  std::set<std::string> inputs;
  std::set<std::string> outputs;
  std::vector<Rule> rules;
  std::function<void(PassContext&)> procedure;  // set for procedural passes

  bool is_procedural() const { return static_cast<bool>(procedure); }
};

// Validates rule heads against outputs and bodies against inputs.
Pass make_pass(std::string name, std::set<std::string> inputs,
               std::set<std::string> outputs, std::vector<Rule> rules);
Pass make_procedural_pass(std::string name, std::set<std::string> inputs,
                          std::set<std::string> outputs,
                          std::function<void(PassContext&)> fn);

using Delta = std::map<std::string, std::map<Tuple, SemiringValue, TupleLess>>;

// One application of the immediate consequence operator: every rule-instance
// contribution with nonzero body annotations, plus-combined per head tuple.
// Relations outside the pass outputs are untouched (and never appear).
Delta immediate_consequence(const Pass& pass, const Store& store);

struct PassStats {
  std::string pass;
  size_t iterations = 0;      // productive rounds
  size_t tuples_added = 0;
  bool support_converged = false;
  bool annotations_converged = false;
  double wall_ms = 0;
};

PassStats run_pass(const Pass& pass, PassContext& ctx);
std::vector<PassStats> run_pipeline(const std::vector<Pass>& passes,
                                    PassContext& ctx);

struct DerivationTree {
  std::string rel;
  Tuple tuple;
  std::string rule_id;          // empty on leaves
  std::optional<Token> token;   // set on leaves
  std::vector<DerivationTree> children;

  std::vector<uint64_t> leaf_tokens() const;  // sorted multiset
};

// Reconstructs one derivation for an annotated fact from the firing log.
DerivationTree witness(const Store& store, const WitnessLog& log,
                       const std::string& rel, const Tuple& t);

// Re-validates a derivation tree: each internal node must be a real rule
// instance over its children, and in provenance mode the leaf-token multiset
// must be a monomial of the root's annotation.
bool validate_witness(const DerivationTree& tree, const Store& store,
                      const std::vector<Pass>& passes, std::string* why);

std::string render_tree(const Store& store, const DerivationTree& tree,
                        int indent = 0);

struct UniversalityReport {
  bool ok = true;
  std::string relation;
  Tuple tuple;
  std::string detail;
};

// Checks h_v(eval over N[X]) == eval over the target semiring with inputs
// pre-mapped by v, relation by relation. d0 must be a provenance-mode store
// whose facts are token-annotated.
UniversalityReport check_universality(
    const std::vector<Pass>& passes, const Store& d0, CTypeTable& types,
    const EngineConfig& config,
    const std::map<uint64_t, SemiringValue>& valuation, SemiringTag target);

}  // namespace reclift
