#include <functional>

#include "pass_util.hpp"

// RTL -> Cminor expression trees by arity dispatch, Csharpminor conversion
// of addressing into explicit pointer arithmetic, and the structuring pass
// (dominators, loop and diamond regions).

namespace reclift {

using namespace detail;

namespace {

const RtlInst& env_rtl(const RuleEnv& env, Var v) {
  const RtlInst* r = as_rtl(env[v]);
  if (!r) throw EngineError("expected an RTL statement");
  return *r;
}

// Strip the immediate off an opcode, yielding the plain binary operator.
OpCode debinop(const OpCode& op) {
  OpCode out = op;
  out.imm = std::nullopt;
  return out;
}

std::optional<Stmt> expr_tree_of(const RtlInst& inst) {
  if (const auto* op = std::get_if<Iop>(&inst)) {
    const auto& o = op->op;
    if (o.name == "Ointconst" || o.name == "Olongconst")
      return Stmt{Sset{op->dst, Expr::constant(o.imm.value_or(0))}};
    if (o.name == "Omove" && op->args.size() == 1)
      return Stmt{Sset{op->dst, Expr::variable(op->args[0])}};
    if (o.name == "Ocmpset" && o.cond) {
      OpCode cmp = OpCode::with_cond("Ocmp", *o.cond);
      if (op->args.size() == 2)
        return Stmt{Sset{op->dst,
                         Expr::binop(cmp, Expr::variable(op->args[0]),
                                     Expr::variable(op->args[1]))}};
      if (op->args.size() == 1 && o.imm)
        return Stmt{Sset{op->dst,
                         Expr::binop(cmp, Expr::variable(op->args[0]),
                                     Expr::constant(*o.imm))}};
      return std::nullopt;
    }
    if (op->args.size() == 1 && o.imm)
      return Stmt{Sset{op->dst,
                       Expr::binop(debinop(o), Expr::variable(op->args[0]),
                                   Expr::constant(*o.imm))}};
    if (op->args.size() == 1)
      return Stmt{Sset{op->dst, Expr::unop(o, Expr::variable(op->args[0]))}};
    if (op->args.size() == 2)
      return Stmt{Sset{op->dst,
                       Expr::binop(o, Expr::variable(op->args[0]),
                                   Expr::variable(op->args[1]))}};
    if (op->args.empty() && o.imm)
      return Stmt{Sset{op->dst, Expr::constant(*o.imm)}};
    return std::nullopt;
  }
  if (const auto* c = std::get_if<Icond>(&inst)) {
    OpCode cmp = OpCode::with_cond(c->width == 64 ? "Ocmpl" : "Ocmp", c->cond);
    ExprPtr lhs = c->args.empty() ? Expr::constant(0)
                                  : Expr::variable(c->args[0]);
    ExprPtr rhs = c->args.size() > 1 ? Expr::variable(c->args[1])
                                     : Expr::constant(c->imm.value_or(0));
    return Stmt{Sifthenelse{Expr::binop(cmp, lhs, rhs), c->iftrue,
                            c->iffalse}};
  }
  if (const auto* r = std::get_if<Ireturn>(&inst)) {
    if (r->value) return Stmt{Sreturn{Expr::variable(*r->value)}};
    return Stmt{Sreturn{nullptr}};
  }
  return std::nullopt;
}

ExprPtr address_expr(const Addressing& addr, const std::vector<Pseudo>& args) {
  switch (addr.kind) {
    case Addressing::Kind::Indexed: {
      ExprPtr base = Expr::variable(args.at(0));
      if (addr.disp == 0) return base;
      return Expr::binop(OpCode::simple("Oaddl"), base,
                         Expr::constant(addr.disp));
    }
    case Addressing::Kind::Indexed2Scaled: {
      ExprPtr idx = Expr::variable(args.at(1));
      if (addr.scale != 1)
        idx = Expr::binop(OpCode::simple("Omull"), idx,
                          Expr::constant(addr.scale));
      ExprPtr sum =
          Expr::binop(OpCode::simple("Oaddl"), Expr::variable(args.at(0)), idx);
      if (addr.disp == 0) return sum;
      return Expr::binop(OpCode::simple("Oaddl"), sum,
                         Expr::constant(addr.disp));
    }
    case Addressing::Kind::Global: {
      ExprPtr sym = Expr::symbol(addr.symbol);
      if (addr.disp == 0) return sym;
      return Expr::binop(OpCode::simple("Oaddl"), sym,
                         Expr::constant(addr.disp));
    }
    case Addressing::Kind::Stack:
      return Expr::unop(OpCode::with_imm("Oaddrstack", addr.disp),
                        Expr::constant(0));
  }
  throw IrError("bad addressing");
}

std::vector<Rule> expr_tree_rules() {
  std::vector<Rule> rules;
  RuleBuilder rb("cminor/expr_tree");
  auto n = rb.var("N"), s = rb.var("S"), out = rb.var("OUT");
  rb.match("rtl_opt", {n, s})
      .when([s](const RuleEnv& e) {
        return expr_tree_of(env_rtl(e, s)).has_value();
      }, "op/cond/return shape")
      .bind(out,
            [s](const RuleEnv& e) {
              return make_stmt(IrLevel::Cminor, *expr_tree_of(env_rtl(e, s)));
            },
            "expression tree by arity")
      .derive("cminor_stmt", {n, out});
  rules.push_back(rb.build());
  {
    RuleBuilder rb2("cminor/succ");
    auto a = rb2.var("A"), b = rb2.var("B"), k = rb2.var("K");
    rb2.match("rtl_succ", {a, b, k}).derive("cminor_succ", {a, b, k});
    rules.push_back(rb2.build());
  }
  return rules;
}

std::vector<Rule> csh_rules() {
  std::vector<Rule> rules;

  // Expression-tree statements carry over unchanged.
  {
    RuleBuilder rb("csh/carry");
    auto n = rb.var("N"), s = rb.var("S"), out = rb.var("OUT");
    rb.match("cminor_stmt", {n, s})
        .bind(out,
              [s](const RuleEnv& e) {
                const Stmt* st = as_stmt_node(e[s]);
                if (!st) throw EngineError("expected a Cminor statement");
                return make_stmt(IrLevel::Csharpminor, *st);
              },
              "level carry")
        .derive("csh_stmt", {n, out});
    rules.push_back(rb.build());
  }

  // Loads and stores become explicit pointer arithmetic.
  {
    RuleBuilder rb("csh/load");
    auto n = rb.var("N"), s = rb.var("S"), out = rb.var("OUT");
    rb.match("rtl_opt", {n, s})
        .when([s](const RuleEnv& e) {
          return std::holds_alternative<Iload>(env_rtl(e, s));
        }, "is load")
        .bind(out,
              [s](const RuleEnv& e) {
                const auto& ld = std::get<Iload>(env_rtl(e, s));
                return make_stmt(
                    IrLevel::Csharpminor,
                    Stmt{Sset{ld.dst,
                              Expr::load(ld.chunk,
                                         address_expr(ld.addr, ld.args))}});
              },
              "addressing to arithmetic")
        .derive("csh_stmt", {n, out});
    rules.push_back(rb.build());
  }
  {
    RuleBuilder rb("csh/store");
    auto n = rb.var("N"), s = rb.var("S"), out = rb.var("OUT");
    rb.match("rtl_opt", {n, s})
        .when([s](const RuleEnv& e) {
          return std::holds_alternative<Istore>(env_rtl(e, s));
        }, "is store")
        .bind(out,
              [s](const RuleEnv& e) {
                const auto& st = std::get<Istore>(env_rtl(e, s));
                return make_stmt(
                    IrLevel::Csharpminor,
                    Stmt{Sstore{st.chunk, address_expr(st.addr, st.args),
                                Expr::variable(st.src)}});
              },
              "addressing to arithmetic")
        .derive("csh_stmt", {n, out});
    rules.push_back(rb.build());
  }

  // Calls take their arity from the reconciled signature.
  {
    RuleBuilder rb("csh/call");
    auto n = rb.var("N"), s = rb.var("S"), tgt = rb.var("TGT"),
         params = rb.var("PARAMS"), ret = rb.var("RET"), va = rb.var("VA"),
         prov = rb.var("PROV"), out = rb.var("OUT");
    rb.match("rtl_opt", {n, s})
        .when([s](const RuleEnv& e) {
          return std::holds_alternative<Icall>(env_rtl(e, s));
        }, "is call")
        .bind(tgt,
              [s](const RuleEnv& e) {
                return Value::atom(std::get<Icall>(env_rtl(e, s)).target);
              },
              "call target")
        .match("signature", {tgt, params, ret, va, prov})
        .bind(out,
              [s, params, ret, va](const RuleEnv& e) {
                const auto& call = std::get<Icall>(env_rtl(e, s));
                size_t arity = e[params].as_tuple().size();
                bool variadic = e[va].as_int() != 0;
                Scall sc;
                sc.target = call.target;
                bool returns_value =
                    e[ret].as_type()->kind != TypeDesc::Kind::Void;
                if (returns_value && call.dst) sc.dst = call.dst;
                size_t take = variadic
                                  ? call.args.size()
                                  : std::min(arity, call.args.size());
                for (size_t i = 0; i < take; ++i)
                  sc.args.push_back(Expr::variable(call.args[i]));
                return make_stmt(IrLevel::Csharpminor, Stmt{std::move(sc)});
              },
              "signature-shaped call")
        .derive("csh_stmt", {n, out});
    rules.push_back(rb.build());
  }

  // Builtins surface as calls.
  {
    RuleBuilder rb("csh/builtin");
    auto n = rb.var("N"), s = rb.var("S"), out = rb.var("OUT");
    rb.match("rtl_opt", {n, s})
        .when([s](const RuleEnv& e) {
          return std::holds_alternative<Ibuiltin>(env_rtl(e, s));
        }, "is builtin")
        .bind(out,
              [s](const RuleEnv& e) {
                const auto& b = std::get<Ibuiltin>(env_rtl(e, s));
                Scall sc;
                sc.target = b.name;
                sc.dst = b.dst;
                for (auto a : b.args) sc.args.push_back(Expr::variable(a));
                return make_stmt(IrLevel::Csharpminor, Stmt{std::move(sc)});
              },
              "builtin call")
        .derive("csh_stmt", {n, out});
    rules.push_back(rb.build());
  }

  // Edges, skipping chains of eliminated nodes.
  {
    RuleBuilder rb("csh/edge_base");
    auto a = rb.var("A"), b = rb.var("B"), k = rb.var("K");
    rb.match("rtl_succ", {a, b, k}).derive("csh_reach", {a, b, k});
    rules.push_back(rb.build());
  }
  {
    RuleBuilder rb("csh/edge_skip");
    auto a = rb.var("A"), e = rb.var("E"), k = rb.var("K"), c = rb.var("C"),
         k2 = rb.var("K2");
    rb.match("csh_reach", {a, e, k})
        .match("node_role", {e, Value::atom("eliminated")})
        .match("rtl_succ", {e, c, k2})
        .derive("csh_reach", {a, c, k});
    rules.push_back(rb.build());
  }
  {
    RuleBuilder rb("csh/edge");
    auto a = rb.var("A"), b = rb.var("B"), k = rb.var("K"), s1 = rb.var("S1"),
         s2 = rb.var("S2");
    rb.match("csh_reach", {a, b, k})
        .match("csh_stmt", {a, s1})
        .match("csh_stmt", {b, s2})
        .derive("csh_succ", {a, b, k});
    rules.push_back(rb.build());
  }

  return rules;
}

}  // namespace

Pass make_expr_trees() {
  return make_pass("expr_trees", {"rtl_opt", "rtl_succ"},
                   {"cminor_stmt", "cminor_succ"}, expr_tree_rules());
}

Pass make_to_csharpminor(CTypeTable&) {
  return make_pass("to_csharpminor",
                   {"cminor_stmt", "rtl_opt", "rtl_succ", "signature",
                    "node_role", "csh_reach", "csh_stmt"},
                   {"csh_stmt", "csh_succ", "csh_reach"}, csh_rules());
}

// ---- structuring -----------------------------------------------------------------

namespace {

struct CshGraph {
  std::vector<NodeId> nodes;
  std::map<uint64_t, size_t> index;
  std::vector<std::vector<size_t>> succs, preds;
  std::vector<std::pair<std::string, Tuple>> facts;  // csh_stmt witness
  std::optional<size_t> entry;
};

CshGraph csh_graph(const Store& store, const std::string& fname) {
  CshGraph g;
  std::set<uint64_t> members;
  for (const auto& [t, k] : store.relation("func_instr").rows)
    if (t[0].as_atom() == fname) members.insert(t[1].as_node().value);
  for (uint64_t v : members) {
    auto cands = store.candidates(IrLevel::Csharpminor, NodeId{v});
    if (cands.empty()) continue;
    g.index[v] = g.nodes.size();
    g.nodes.push_back(NodeId{v});
    g.facts.push_back(
        {"csh_stmt", Tuple{Value::node(NodeId{v}), cands[0].first}});
  }
  g.succs.resize(g.nodes.size());
  g.preds.resize(g.nodes.size());
  for (const auto& [t, k] : store.relation("csh_succ").rows) {
    auto a = g.index.find(t[0].as_node().value);
    auto b = g.index.find(t[1].as_node().value);
    if (a == g.index.end() || b == g.index.end()) continue;
    g.succs[a->second].push_back(b->second);
    g.preds[b->second].push_back(a->second);
  }
  for (auto& v : g.succs) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  for (auto& v : g.preds) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  for (const auto& [t, k] : store.relation("func_entry").rows)
    if (t[0].as_atom() == fname) {
      auto it = g.index.find(t[1].as_node().value);
      if (it != g.index.end()) g.entry = it->second;
    }
  return g;
}

// Iterative dominator analysis; unreached nodes keep the full set.
std::vector<std::set<size_t>> dominators(
    size_t n, size_t entry, const std::vector<std::vector<size_t>>& preds) {
  std::set<size_t> all;
  for (size_t i = 0; i < n; ++i) all.insert(i);
  std::vector<std::set<size_t>> dom(n, all);
  dom[entry] = {entry};
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < n; ++i) {
      if (i == entry) continue;
      std::set<size_t> d = all;
      bool any = false;
      for (size_t p : preds[i]) {
        if (!any) {
          d = dom[p];
          any = true;
        } else {
          std::set<size_t> inter;
          std::set_intersection(d.begin(), d.end(), dom[p].begin(),
                                dom[p].end(),
                                std::inserter(inter, inter.begin()));
          d = std::move(inter);
        }
      }
      if (any) d.insert(i);
      if (d != dom[i]) {
        dom[i] = std::move(d);
        changed = true;
      }
    }
  }
  return dom;
}

void run_structure(PassContext& ctx) {
  auto& store = ctx.store;
  const std::string pass = "structure_cfg";

  for (const auto& f : function_views(store)) {
    CshGraph g = csh_graph(store, f.name);
    if (g.nodes.empty() || !g.entry) continue;
    size_t n = g.nodes.size();
    auto dom = dominators(n, *g.entry, g.preds);

    // Loops from back edges.
    for (size_t b = 0; b < n; ++b) {
      for (size_t h : g.succs[b]) {
        if (!dom[b].count(h)) continue;
        // Natural loop body: reverse reachability from b without crossing h.
        std::set<size_t> body = {h, b};
        std::vector<size_t> work = {b};
        while (!work.empty()) {
          size_t x = work.back();
          work.pop_back();
          if (x == h) continue;
          for (size_t p : g.preds[x])
            if (body.insert(p).second) work.push_back(p);
        }
        NodeId rep = store.alloc_synthetic();
        std::vector<Value> members;
        for (size_t m : body) members.push_back(Value::node(g.nodes[m]));
        ctx.derive(pass, "region",
                   {vatom(f.name), vatom("Loop"), Value::node(g.nodes[h]),
                    Value::node(rep), Value::tuple(std::move(members))},
                   {g.facts[h], g.facts[b]});
        ctx.derive(pass, "csh_stmt",
                   {Value::node(rep),
                    make_stmt(IrLevel::Csharpminor, Stmt{Sloop{g.nodes[h]}})},
                   {g.facts[h]});
        ctx.derive(pass, "func_instr", {vatom(f.name), Value::node(rep)},
                   {g.facts[h]});
      }
    }

    // Diamonds: a two-way branch whose arms converge on an immediate
    // postdominator.
    //
    // Postdominators via dominators of the reversed graph with a virtual
    // exit joining every return node.
    {
      std::vector<std::vector<size_t>> rsuccs(n + 1), rpreds(n + 1);
      for (size_t i = 0; i < n; ++i) {
        for (size_t s : g.succs[i]) {
          rsuccs[s].push_back(i);
          rpreds[i].push_back(s);
        }
        if (g.succs[i].empty()) {
          rsuccs[i].push_back(n);  // exit -> returns in the reversed graph
          rpreds[i].push_back(n);
        }
      }
      (void)rsuccs;
      auto pdom = dominators(n + 1, n, rpreds);

      for (size_t c = 0; c < n; ++c) {
        if (g.succs[c].size() != 2) continue;
        // Immediate postdominator: the nearest strict postdominator.
        std::set<size_t> cand = pdom[c];
        cand.erase(c);
        cand.erase(n);
        std::optional<size_t> ipdom;
        for (size_t j : cand) {
          bool nearest = true;
          for (size_t o : cand)
            if (o != j && pdom[o].count(j)) nearest = false;
          if (nearest) {
            ipdom = j;
            break;
          }
        }
        if (!ipdom) continue;
        // Back edges make loops, not diamonds.
        if (dom[c].count(g.succs[c][0]) || dom[c].count(g.succs[c][1]))
          continue;
        if (g.succs[c][0] == *ipdom || g.succs[c][1] == *ipdom)
          continue;  // one-armed if; emission handles it linearly
        NodeId rep = store.alloc_synthetic();
        ctx.derive(pass, "region",
                   {vatom(f.name), vatom("IfThenElse"),
                    Value::node(g.nodes[c]), Value::node(rep),
                    Value::tuple({Value::node(g.nodes[*ipdom])})},
                   {g.facts[c]});
        ctx.derive(pass, "csh_stmt",
                   {Value::node(rep),
                    make_stmt(IrLevel::Csharpminor, Stmt{Sblock{g.nodes[c]}})},
                   {g.facts[c]});
        ctx.derive(pass, "func_instr", {vatom(f.name), Value::node(rep)},
                   {g.facts[c]});
      }
    }

    // Switch chains: three or more consecutive equality tests on one
    // variable, linked by false edges.
    {
      auto eq_test_var = [&](size_t i) -> std::optional<Pseudo> {
        auto cands = store.candidates(IrLevel::Csharpminor, g.nodes[i]);
        for (const auto& [sv, ann] : cands) {
          const Stmt* st = as_stmt_node(sv);
          if (!st) continue;
          const auto* ite = std::get_if<Sifthenelse>(st);
          if (!ite || !ite->cond) continue;
          if (ite->cond->kind == Expr::Kind::Binop && ite->cond->op.cond &&
              *ite->cond->op.cond == Cond::Ceq && ite->cond->a &&
              ite->cond->a->kind == Expr::Kind::Var)
            return ite->cond->a->var;
        }
        return std::nullopt;
      };
      auto false_succ = [&](size_t i) -> std::optional<size_t> {
        for (const auto& [t, k] : store.relation("csh_succ").rows) {
          if (t[0].as_node().value != g.nodes[i].value) continue;
          if (t[2].as_atom() != "branch-false") continue;
          auto it = g.index.find(t[1].as_node().value);
          if (it != g.index.end()) return it->second;
        }
        return std::nullopt;
      };
      std::set<size_t> in_chain;
      for (size_t c = 0; c < n; ++c) {
        if (in_chain.count(c)) continue;
        auto v = eq_test_var(c);
        if (!v) continue;
        std::vector<size_t> chain = {c};
        auto cur = false_succ(c);
        while (cur) {
          auto v2 = eq_test_var(*cur);
          if (!v2 || *v2 != *v) break;
          chain.push_back(*cur);
          cur = false_succ(*cur);
        }
        if (chain.size() < 3) continue;
        for (size_t m : chain) in_chain.insert(m);
        NodeId rep = store.alloc_synthetic();
        std::vector<Value> members;
        for (size_t m : chain) members.push_back(Value::node(g.nodes[m]));
        ctx.derive(pass, "region",
                   {vatom(f.name), vatom("SwitchChain"),
                    Value::node(g.nodes[chain[0]]), Value::node(rep),
                    Value::tuple(std::move(members))},
                   {g.facts[chain[0]]});
        ctx.derive(pass, "csh_stmt",
                   {Value::node(rep),
                    make_stmt(IrLevel::Csharpminor,
                              Stmt{Sblock{g.nodes[chain[0]]}})},
                   {g.facts[chain[0]]});
        ctx.derive(pass, "func_instr", {vatom(f.name), Value::node(rep)},
                   {g.facts[chain[0]]});
      }
    }
  }
}

}  // namespace

Pass make_structure_cfg() {
  return make_procedural_pass(
      "structure_cfg",
      {"csh_stmt", "csh_succ", "func", "func_instr", "func_entry"},
      {"region", "csh_stmt", "func_instr"}, run_structure);
}

}  // namespace reclift
