#include "reclift/engine.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace reclift {

// ---- rule building -----------------------------------------------------------

Var RuleBuilder::var(std::string name) {
  Var v{static_cast<int>(rule_.var_count++)};
  rule_.var_names.push_back(std::move(name));
  return v;
}

RuleBuilder& RuleBuilder::match(std::string rel, std::vector<Term> args) {
  rule_.steps.push_back(MatchStep{AtomPat{std::move(rel), std::move(args)}});
  return *this;
}

RuleBuilder& RuleBuilder::bind(Var out, ComputeFn fn, std::string note) {
  rule_.steps.push_back(ComputeStep{out, std::move(fn), std::move(note)});
  return *this;
}

RuleBuilder& RuleBuilder::when(GuardFn fn, std::string note) {
  rule_.steps.push_back(GuardStep{std::move(fn), std::move(note)});
  return *this;
}

RuleBuilder& RuleBuilder::derive(std::string rel, std::vector<Term> args) {
  rule_.head = AtomPat{std::move(rel), std::move(args)};
  has_head_ = true;
  return *this;
}

Rule RuleBuilder::build() {
  if (!has_head_) throw EngineError("rule " + rule_.id + " has no head");
  std::vector<char> bound(rule_.var_count, 0);
  for (const auto& step : rule_.steps) {
    if (auto* m = std::get_if<MatchStep>(&step)) {
      for (const auto& term : m->atom.args)
        if (term.var) bound[term.var->slot] = 1;
    } else if (auto* c = std::get_if<ComputeStep>(&step)) {
      bound[c->out.slot] = 1;
    }
  }
  for (const auto& term : rule_.head.args)
    if (term.var && !bound[term.var->slot])
      throw EngineError("rule " + rule_.id + ": head variable " +
                        rule_.var_names[term.var->slot] +
                        " is never bound by the body");
  return std::move(rule_);
}

namespace {

std::string term_text(const Rule& r, const Term& t) {
  if (t.var) return r.var_names[t.var->slot];
  return render_value(*t.constant);
}

std::string atom_text(const Rule& r, const AtomPat& a) {
  std::string s = a.rel + "(";
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ", ";
    s += term_text(r, a.args[i]);
  }
  return s + ")";
}

}  // namespace

std::string Rule::describe() const {
  std::string s = atom_text(*this, head) + " ← ";
  bool first = true;
  for (const auto& step : steps) {
    if (!first) s += ", ";
    first = false;
    if (auto* m = std::get_if<MatchStep>(&step)) {
      s += atom_text(*this, m->atom);
    } else if (auto* c = std::get_if<ComputeStep>(&step)) {
      s += "{" + var_names[c->out.slot] + " := " + c->note + "}";
    } else if (auto* g = std::get_if<GuardStep>(&step)) {
      s += "{" + g->note + "}";
    }
  }
  return s;
}

// ---- witness log ---------------------------------------------------------------

void WitnessLog::record(Firing f) {
  std::ostringstream key;
  key << f.rule_id << "|" << f.rel << "|" << render_tuple(f.head);
  for (const auto& [rel, t] : f.body) key << "|" << rel << ":" << render_tuple(t);
  if (!seen_.insert(key.str()).second) return;
  auto head_key = std::make_pair(f.rel, render_tuple(f.head));
  first_.emplace(head_key, entries_.size());
  entries_.push_back(std::move(f));
}

const Firing* WitnessLog::first_for(const std::string& rel,
                                    const Tuple& t) const {
  auto it = first_.find(std::make_pair(rel, render_tuple(t)));
  if (it == first_.end()) return nullptr;
  return &entries_[it->second];
}

// ---- rule evaluation ------------------------------------------------------------

class RuleEval {
 public:
  struct Options {
    int delta_step = -1;
    const std::set<Tuple, TupleLess>* delta = nullptr;
    const Tuple* head_filter = nullptr;
    bool want_bodies = false;
  };
  using Sink =
      std::function<void(const Tuple&, const SemiringValue&,
                         const std::vector<std::pair<std::string, Tuple>>&)>;

  RuleEval(const Store& store, const Rule& rule, Options opt, Sink sink)
      : store_(store),
        rule_(rule),
        opt_(opt),
        sink_(std::move(sink)),
        env_(rule.var_count) {}

  void run() {
    if (opt_.head_filter) {
      const Tuple& target = *opt_.head_filter;
      if (target.size() != rule_.head.args.size()) return;
      std::vector<int> newly;
      bool ok = true;
      for (size_t i = 0; i < target.size(); ++i) {
        if (!bind_term(rule_.head.args[i], target[i], newly)) {
          ok = false;
          break;
        }
      }
      if (ok) step(0, SemiringValue::one(store_.mode()));
      for (int slot : newly) env_.bound_[slot] = 0;
      return;
    }
    step(0, SemiringValue::one(store_.mode()));
  }

 private:
  bool bind_term(const Term& term, const Value& v, std::vector<int>& newly) {
    if (term.constant) return *term.constant == v;
    int slot = term.var->slot;
    if (env_.bound_[slot]) return env_.vals_[slot] == v;
    env_.vals_[slot] = v;
    env_.bound_[slot] = 1;
    newly.push_back(slot);
    return true;
  }

  [[noreturn]] void rethrow(const char* what, const std::string& note,
                            const std::exception& e) {
    std::ostringstream os;
    os << "rule " << rule_.id << ": " << what << " '" << note
       << "' failed: " << e.what() << " [bound:";
    for (size_t i = 0; i < rule_.var_count; ++i)
      if (env_.bound_[i])
        os << " " << rule_.var_names[i] << "=" << render_value(env_.vals_[i]);
    os << "]";
    throw EngineError(os.str());
  }

  void emit(const SemiringValue& acc) {
    Tuple head;
    head.reserve(rule_.head.args.size());
    for (const auto& term : rule_.head.args) {
      if (term.constant)
        head.push_back(*term.constant);
      else
        head.push_back(env_[*term.var]);
    }
    if (opt_.head_filter && !tuple_eq(head, *opt_.head_filter)) return;
    sink_(head, acc, bodies_);
  }

  void match_one(const MatchStep& m, size_t idx, const Tuple& row,
                 const SemiringValue& ann, const SemiringValue& acc) {
    if (m.atom.args.size() != row.size())
      throw EngineError("rule " + rule_.id + ": arity mismatch on " +
                        m.atom.rel);
    std::vector<int> newly;
    bool ok = true;
    for (size_t i = 0; i < row.size(); ++i) {
      if (!bind_term(m.atom.args[i], row[i], newly)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      if (opt_.want_bodies) bodies_.emplace_back(m.atom.rel, row);
      step(idx + 1, times(acc, ann, store_.term_cap()));
      if (opt_.want_bodies) bodies_.pop_back();
    }
    for (int slot : newly) env_.bound_[slot] = 0;
  }

  void step(size_t idx, const SemiringValue& acc) {
    if (idx == rule_.steps.size()) {
      emit(acc);
      return;
    }
    const auto& st = rule_.steps[idx];
    if (auto* m = std::get_if<MatchStep>(&st)) {
      const Relation& rel = store_.relation(m->atom.rel);
      if (static_cast<int>(idx) == opt_.delta_step) {
        for (const auto& t : *opt_.delta) {
          auto it = rel.rows.find(t);
          if (it == rel.rows.end()) continue;
          match_one(*m, idx, it->first, it->second.total(store_.term_cap()),
                    acc);
        }
      } else {
        for (const auto& [t, ann] : rel.rows)
          match_one(*m, idx, t, ann.total(store_.term_cap()), acc);
      }
    } else if (auto* c = std::get_if<ComputeStep>(&st)) {
      Value v;
      try {
        v = c->fn(env_);
      } catch (const EngineError&) {
        throw;
      } catch (const std::exception& e) {
        rethrow("computed premise", c->note, e);
      }
      std::vector<int> newly;
      if (bind_term(Term(c->out), v, newly)) step(idx + 1, acc);
      for (int slot : newly) env_.bound_[slot] = 0;
    } else if (auto* g = std::get_if<GuardStep>(&st)) {
      bool pass = false;
      try {
        pass = g->fn(env_);
      } catch (const EngineError&) {
        throw;
      } catch (const std::exception& e) {
        rethrow("guard", g->note, e);
      }
      if (pass) step(idx + 1, acc);
    }
  }

  const Store& store_;
  const Rule& rule_;
  Options opt_;
  Sink sink_;
  RuleEnv env_;
  std::vector<std::pair<std::string, Tuple>> bodies_;
};

// ---- passes -------------------------------------------------------------------

Pass make_pass(std::string name, std::set<std::string> inputs,
               std::set<std::string> outputs, std::vector<Rule> rules) {
  for (const auto& r : rules) {
    if (!outputs.count(r.head.rel))
      throw EngineError("pass " + name + ": rule " + r.id + " derives " +
                        r.head.rel + " which is not an output");
    for (const auto& step : r.steps)
      if (auto* m = std::get_if<MatchStep>(&step))
        if (!inputs.count(m->atom.rel))
          throw EngineError("pass " + name + ": rule " + r.id + " reads " +
                            m->atom.rel + " which is not an input");
  }
  Pass p;
  p.name = std::move(name);
  p.inputs = std::move(inputs);
  p.outputs = std::move(outputs);
  p.rules = std::move(rules);
  return p;
}

Pass make_procedural_pass(std::string name, std::set<std::string> inputs,
                          std::set<std::string> outputs,
                          std::function<void(PassContext&)> fn) {
  Pass p;
  p.name = std::move(name);
  p.inputs = std::move(inputs);
  p.outputs = std::move(outputs);
  p.procedure = std::move(fn);
  return p;
}

bool PassContext::derive(
    const std::string& pass_name, const std::string& rel, Tuple t,
    const std::vector<std::pair<std::string, Tuple>>& because) {
  SemiringValue ann = SemiringValue::one(store.mode());
  for (const auto& [brel, bt] : because) {
    SemiringValue v = store.annotation_of(brel, bt);
    if (is_zero(v))
      throw EngineError("pass " + pass_name + ": justification fact " + brel +
                        "(" + render_tuple(bt) + ") has no annotation");
    ann = times(ann, v, store.term_cap());
  }
  if (log) log->record(Firing{pass_name + "/proc", rel, t, because});
  return store.insert_lub(rel, std::move(t), std::move(ann));
}

Delta immediate_consequence(const Pass& pass, const Store& store) {
  Delta out;
  for (const auto& rule : pass.rules) {
    RuleEval eval(store, rule, RuleEval::Options{},
                  [&](const Tuple& head, const SemiringValue& contrib,
                      const auto&) {
                    auto& slot = out[rule.head.rel];
                    auto it = slot.find(head);
                    if (it == slot.end())
                      slot.emplace(head, contrib);
                    else
                      it->second = plus(it->second, contrib, store.term_cap());
                  });
    eval.run();
  }
  return out;
}

namespace {

void check_declared(const Pass& pass, const Store& store) {
  for (const auto& r : pass.inputs)
    if (!store.is_declared(r))
      throw EngineError("pass " + pass.name + ": input relation " + r +
                        " is not declared");
  for (const auto& r : pass.outputs)
    if (!store.is_declared(r))
      throw EngineError("pass " + pass.name + ": output relation " + r +
                        " is not declared");
}

size_t total_rows(const Store& store, const std::set<std::string>& rels) {
  size_t n = 0;
  for (const auto& r : rels) n += store.relation(r).rows.size();
  return n;
}

using DeltaSupport = std::map<std::string, std::set<Tuple, TupleLess>>;

// Full evaluation of every rule: T-values per head tuple.
Delta full_tvalues(const Pass& pass, const Store& store, WitnessLog* log) {
  Delta tvals;
  for (const auto& rule : pass.rules) {
    RuleEval::Options opt;
    opt.want_bodies = log != nullptr;
    RuleEval eval(store, rule, opt,
                  [&](const Tuple& head, const SemiringValue& contrib,
                      const std::vector<std::pair<std::string, Tuple>>& bodies) {
                    if (log)
                      log->record(Firing{rule.id, rule.head.rel, head, bodies});
                    auto& slot = tvals[rule.head.rel];
                    auto it = slot.find(head);
                    if (it == slot.end())
                      slot.emplace(head, contrib);
                    else
                      it->second = plus(it->second, contrib, store.term_cap());
                  });
    eval.run();
  }
  return tvals;
}

// Head tuples whose T-value may have changed given last round's delta.
DeltaSupport affected_heads(const Pass& pass, const Store& store,
                            const DeltaSupport& delta) {
  DeltaSupport affected;
  for (const auto& rule : pass.rules) {
    for (size_t j = 0; j < rule.steps.size(); ++j) {
      auto* m = std::get_if<MatchStep>(&rule.steps[j]);
      if (!m) continue;
      auto dit = delta.find(m->atom.rel);
      if (dit == delta.end() || dit->second.empty()) continue;
      RuleEval::Options opt;
      opt.delta_step = static_cast<int>(j);
      opt.delta = &dit->second;
      RuleEval eval(store, rule, opt,
                    [&](const Tuple& head, const SemiringValue&, const auto&) {
                      affected[rule.head.rel].insert(head);
                    });
      eval.run();
    }
  }
  return affected;
}

// Recomputes the full T-value of one head tuple across all rules of the pass.
SemiringValue recompute_head(const Pass& pass, const Store& store,
                             const std::string& rel, const Tuple& t,
                             WitnessLog* log) {
  SemiringValue tval = SemiringValue::zero(store.mode());
  for (const auto& rule : pass.rules) {
    if (rule.head.rel != rel) continue;
    RuleEval::Options opt;
    opt.head_filter = &t;
    opt.want_bodies = log != nullptr;
    RuleEval eval(store, rule, opt,
                  [&](const Tuple& head, const SemiringValue& contrib,
                      const std::vector<std::pair<std::string, Tuple>>& bodies) {
                    if (log)
                      log->record(Firing{rule.id, rule.head.rel, head, bodies});
                    tval = plus(tval, contrib, store.term_cap());
                  });
    eval.run();
  }
  return tval;
}

}  // namespace

PassStats run_pass(const Pass& pass, PassContext& ctx) {
  PassStats st;
  st.pass = pass.name;
  auto t0 = std::chrono::steady_clock::now();
  check_declared(pass, ctx.store);

  std::optional<Store> before;
  if (ctx.config.check_monotonic) before = ctx.store.clone();

  if (pass.is_procedural()) {
    size_t rows0 = total_rows(ctx.store, pass.outputs);
    pass.procedure(ctx);
    st.tuples_added = total_rows(ctx.store, pass.outputs) - rows0;
    st.iterations = 1;
    st.support_converged = true;
    st.annotations_converged = true;
  } else {
    WitnessLog* log = ctx.config.collect_firings ? ctx.log : nullptr;
    DeltaSupport delta;
    bool first = true;
    int settle = 0;
    size_t rounds = 0;
    bool naive = ctx.config.strategy == EngineConfig::Strategy::Naive;
    while (true) {
      if (++rounds > ctx.config.iteration_limit)
        throw EngineError("pass " + pass.name + " exceeded the iteration limit (" +
                          std::to_string(ctx.config.iteration_limit) + ")");
      Delta tvals;
      if (first || naive) {
        tvals = full_tvalues(pass, ctx.store, log);
      } else {
        auto affected = affected_heads(pass, ctx.store, delta);
        for (const auto& [rel, tuples] : affected)
          for (const auto& t : tuples)
            tvals[rel].emplace(t,
                               recompute_head(pass, ctx.store, rel, t, log));
      }
      DeltaSupport changed;
      bool any_new = false, any_change = false;
      for (auto& [rel, rows] : tvals) {
        for (auto& [t, v] : rows) {
          if (is_zero(v)) continue;
          bool existed = ctx.store.has(rel, t);
          if (ctx.store.insert_lub(rel, t, v)) {
            any_change = true;
            if (!existed) {
              any_new = true;
              st.tuples_added++;
            }
            changed[rel].insert(t);
          }
        }
      }
      if (!any_change) {
        st.support_converged = true;
        st.annotations_converged = true;
        break;
      }
      st.iterations++;
      if (!any_new) {
        if (++settle >= ctx.config.annotation_settle_iters) {
          st.support_converged = true;
          st.annotations_converged = false;
          break;
        }
      } else {
        settle = 0;
      }
      delta = std::move(changed);
      first = false;
    }
  }

  if (before && !store_leq(*before, ctx.store))
    throw EngineError("pass " + pass.name + " violated store monotonicity");

  st.wall_ms = std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0)
                   .count();
  return st;
}

std::vector<PassStats> run_pipeline(const std::vector<Pass>& passes,
                                    PassContext& ctx) {
  std::vector<PassStats> stats;
  stats.reserve(passes.size());
  for (const auto& pass : passes) stats.push_back(run_pass(pass, ctx));
  return stats;
}

// ---- witnesses -----------------------------------------------------------------

std::vector<uint64_t> DerivationTree::leaf_tokens() const {
  std::vector<uint64_t> out;
  if (token) {
    out.push_back(token->id);
    return out;
  }
  for (const auto& c : children) {
    auto sub = c.leaf_tokens();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct WitnessBuilder {
  const Store& store;
  const WitnessLog& log;
  std::map<std::pair<std::string, std::string>, Token> ext;
  std::set<std::string> in_progress;

  DerivationTree build(const std::string& rel, const Tuple& t) {
    auto key = std::make_pair(rel, render_tuple(t));
    auto eit = ext.find(key);
    if (eit != ext.end()) {
      DerivationTree leaf;
      leaf.rel = rel;
      leaf.tuple = t;
      leaf.token = eit->second;
      return leaf;
    }
    const Firing* f = log.first_for(rel, t);
    if (!f)
      throw EngineError("no logged derivation for " + rel + "(" +
                        render_tuple(t) +
                        "); was the witness log enabled for the run?");
    std::string guard_key = key.first + "|" + key.second;
    if (!in_progress.insert(guard_key).second)
      throw EngineError("cyclic firing log at " + rel);
    DerivationTree node;
    node.rel = rel;
    node.tuple = t;
    node.rule_id = f->rule_id;
    for (const auto& [brel, bt] : f->body)
      node.children.push_back(build(brel, bt));
    in_progress.erase(guard_key);
    return node;
  }
};

}  // namespace

DerivationTree witness(const Store& store, const WitnessLog& log,
                       const std::string& rel, const Tuple& t) {
  if (is_zero(store.annotation_of(rel, t)))
    throw EngineError("witness requested for a fact with zero annotation: " +
                      rel + "(" + render_tuple(t) + ")");
  WitnessBuilder wb{store, log, {}, {}};
  for (uint64_t id = 1; id <= store.tokens_issued(); ++id) {
    const auto& info = store.token_info(id);
    wb.ext.emplace(std::make_pair(info.rel, render_tuple(info.tuple)),
                   Token{id});
  }
  return wb.build(rel, t);
}

namespace {

bool validate_node(const DerivationTree& tree, const Store& store,
                   const std::vector<Pass>& passes, std::string* why) {
  if (tree.token) {
    const auto& info = store.token_info(tree.token->id);
    if (info.rel != tree.rel || !tuple_eq(info.tuple, tree.tuple)) {
      if (why) *why = "leaf token does not match its fact";
      return false;
    }
    return true;
  }
  if (is_zero(store.annotation_of(tree.rel, tree.tuple))) {
    if (why) *why = "internal node " + tree.rel + " has zero annotation";
    return false;
  }
  for (const auto& c : tree.children)
    if (!validate_node(c, store, passes, why)) return false;

  // Procedural firings cannot be re-instantiated; nonzero children suffice.
  if (tree.rule_id.size() > 5 &&
      tree.rule_id.substr(tree.rule_id.size() - 5) == "/proc")
    return true;

  std::vector<std::string> want;
  for (const auto& c : tree.children)
    want.push_back(c.rel + "|" + render_tuple(c.tuple));
  std::sort(want.begin(), want.end());

  for (const auto& pass : passes) {
    for (const auto& rule : pass.rules) {
      if (rule.id != tree.rule_id || rule.head.rel != tree.rel) continue;
      bool found = false;
      RuleEval::Options opt;
      opt.head_filter = &tree.tuple;
      opt.want_bodies = true;
      RuleEval eval(store, rule, opt,
                    [&](const Tuple&, const SemiringValue&,
                        const std::vector<std::pair<std::string, Tuple>>& bodies) {
                      if (found) return;
                      std::vector<std::string> got;
                      for (const auto& [brel, bt] : bodies)
                        got.push_back(brel + "|" + render_tuple(bt));
                      std::sort(got.begin(), got.end());
                      if (got == want) found = true;
                    });
      eval.run();
      if (found) return true;
    }
  }
  if (why)
    *why = "no rule instance of " + tree.rule_id + " derives " + tree.rel +
           "(" + render_tuple(tree.tuple) + ") from the recorded bodies";
  return false;
}

}  // namespace

bool validate_witness(const DerivationTree& tree, const Store& store,
                      const std::vector<Pass>& passes, std::string* why) {
  if (!validate_node(tree, store, passes, why)) return false;
  if (store.mode() == SemiringTag::Provenance) {
    const Polynomial poly =
        store.annotation_of(tree.rel, tree.tuple).as_polynomial();
    if (!poly.capped()) {
      Monomial m(tree.leaf_tokens());
      if (poly.coefficient(m).is_zero()) {
        if (why)
          *why = "leaf-token multiset is not a monomial of the annotation " +
                 render(poly);
        return false;
      }
    }
  }
  return true;
}

std::string render_tree(const Store& store, const DerivationTree& tree,
                        int indent) {
  std::ostringstream os;
  for (int i = 0; i < indent; ++i) os << "  ";
  os << tree.rel << "(" << render_tuple(tree.tuple) << ")";
  if (tree.token) {
    os << "  [x" << tree.token->id;
    const auto& note = store.token_info(tree.token->id).note;
    if (!note.empty()) os << " = " << note;
    os << "]";
  } else {
    os << "  via " << tree.rule_id;
  }
  os << "\n";
  for (const auto& c : tree.children)
    os << render_tree(store, c, indent + 1);
  return os.str();
}

// ---- universality ----------------------------------------------------------------

UniversalityReport check_universality(
    const std::vector<Pass>& passes, const Store& d0, CTypeTable& types,
    const EngineConfig& config,
    const std::map<uint64_t, SemiringValue>& valuation, SemiringTag target) {
  if (d0.mode() != SemiringTag::Provenance)
    throw EngineError("check_universality needs a provenance-mode input store");

  EngineConfig cfg = config;
  cfg.collect_firings = false;

  Store a = d0.clone();
  PassContext actx{a, types, cfg, nullptr};
  run_pipeline(passes, actx);

  Valuation v = [&](Token t) -> std::optional<SemiringValue> {
    auto it = valuation.find(t.id);
    if (it == valuation.end()) return std::nullopt;
    return it->second;
  };

  Store b(target, d0.term_cap());
  for (const auto& name : d0.relation_names()) b.declare(d0.schema(name));
  for (const auto& name : d0.relation_names()) {
    for (const auto& [t, ann] : d0.relation(name).rows) {
      SemiringValue mapped = eval_hom(ann.total(d0.term_cap()).as_polynomial(),
                                      v, target, d0.term_cap());
      if (!is_zero(mapped)) b.insert(name, t, mapped);
    }
  }
  PassContext bctx{b, types, cfg, nullptr};
  run_pipeline(passes, bctx);

  UniversalityReport rep;
  for (const auto& name : a.relation_names()) {
    for (const auto& [t, ann] : a.relation(name).rows) {
      SemiringValue expect = eval_hom(ann.total(a.term_cap()).as_polynomial(),
                                      v, target, d0.term_cap());
      SemiringValue got = b.annotation_of(name, t);
      if (!(expect == got)) {
        rep.ok = false;
        rep.relation = name;
        rep.tuple = t;
        rep.detail = "h_v gives " + render(expect) + ", direct evaluation " +
                     render(got);
        return rep;
      }
    }
    for (const auto& [t, ann] : b.relation(name).rows) {
      if (!a.has(name, t) && !is_zero(ann.total(b.term_cap()))) {
        rep.ok = false;
        rep.relation = name;
        rep.tuple = t;
        rep.detail = "fact derived directly over " +
                     std::string(to_string(target)) +
                     " but absent over N[X]";
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace reclift
