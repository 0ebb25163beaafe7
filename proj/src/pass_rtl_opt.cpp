#include "pass_util.hpp"

// RTL optimization to a fixpoint: copy propagation, dead store elimination
// and live-range merging. Originals stay in rtl_inst; the optimized
// generation goes to rtl_opt, which downstream passes consume.

namespace reclift {

using namespace detail;

namespace {

std::vector<Pseudo> stmt_uses(const RtlInst& s) {
  std::vector<Pseudo> out;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Iop>) {
          out = n.args;
        } else if constexpr (std::is_same_v<T, Iload>) {
          out = n.args;
        } else if constexpr (std::is_same_v<T, Istore>) {
          out = n.args;
          out.push_back(n.src);
        } else if constexpr (std::is_same_v<T, Icall>) {
          out = n.args;
        } else if constexpr (std::is_same_v<T, Icond>) {
          out = n.args;
        } else if constexpr (std::is_same_v<T, Ireturn>) {
          if (n.value) out.push_back(*n.value);
        } else if constexpr (std::is_same_v<T, Ibuiltin>) {
          out = n.args;
        }
      },
      s);
  return out;
}

std::optional<Pseudo> stmt_def(const RtlInst& s) {
  std::optional<Pseudo> out;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Iop>) out = n.dst;
        if constexpr (std::is_same_v<T, Iload>) out = n.dst;
        if constexpr (std::is_same_v<T, Icall>) out = n.dst;
        if constexpr (std::is_same_v<T, Ibuiltin>) out = n.dst;
      },
      s);
  return out;
}

RtlInst substitute(const RtlInst& s, const std::map<Pseudo, Pseudo>& sub) {
  auto m = [&](Pseudo p) {
    auto it = sub.find(p);
    return it == sub.end() ? p : it->second;
  };
  auto ms = [&](std::vector<Pseudo> ps) {
    for (auto& p : ps) p = m(p);
    return ps;
  };
  RtlInst out = s;
  std::visit(
      [&](auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Iop>) {
          n.args = ms(n.args);
        } else if constexpr (std::is_same_v<T, Iload>) {
          n.args = ms(n.args);
        } else if constexpr (std::is_same_v<T, Istore>) {
          n.args = ms(n.args);
          n.src = m(n.src);
        } else if constexpr (std::is_same_v<T, Icall>) {
          n.args = ms(n.args);
        } else if constexpr (std::is_same_v<T, Icond>) {
          n.args = ms(n.args);
        } else if constexpr (std::is_same_v<T, Ireturn>) {
          if (n.value) n.value = m(*n.value);
        } else if constexpr (std::is_same_v<T, Ibuiltin>) {
          n.args = ms(n.args);
        }
      },
      out);
  return out;
}

struct OptGraph {
  std::vector<NodeId> nodes;
  std::map<uint64_t, size_t> index;
  std::vector<std::vector<size_t>> succs, preds;
  std::vector<std::vector<RtlInst>> stmts;
  std::vector<Value> first_val;
};

void run_optimize(PassContext& ctx) {
  auto& store = ctx.store;
  const std::string pass = "rtl_optimize";

  for (const auto& f : function_views(store)) {
    OptGraph g;
    std::set<uint64_t> members;
    for (const auto& [t, k] : store.relation("func_instr").rows)
      if (t[0].as_atom() == f.name) members.insert(t[1].as_node().value);
    for (uint64_t v : members) {
      auto cands = store.candidates(IrLevel::Rtl, NodeId{v});
      if (cands.empty()) continue;
      g.index[v] = g.nodes.size();
      g.nodes.push_back(NodeId{v});
      std::vector<RtlInst> ss;
      for (const auto& [sv, ann] : cands)
        if (const auto* r = as_rtl(sv)) ss.push_back(*r);
      g.stmts.push_back(std::move(ss));
      g.first_val.push_back(cands[0].first);
    }
    if (g.nodes.empty()) continue;
    g.succs.resize(g.nodes.size());
    g.preds.resize(g.nodes.size());
    for (const auto& [t, k] : store.relation("rtl_succ").rows) {
      auto a = g.index.find(t[0].as_node().value);
      auto b = g.index.find(t[1].as_node().value);
      if (a == g.index.end() || b == g.index.end()) continue;
      g.succs[a->second].push_back(b->second);
      g.preds[b->second].push_back(a->second);
    }

    std::set<Pseudo> params, pinned;
    for (const auto& [t, k] : store.relation("param_reg").rows)
      if (t[0].as_atom() == f.name)
        params.insert(static_cast<Pseudo>(t[2].as_int()));
    for (const auto& [t, k] : store.relation("ret_pseudo").rows)
      if (t[0].as_atom() == f.name)
        pinned.insert(static_cast<Pseudo>(t[1].as_int()));
    // Float-return webs stay observable too.
    for (const auto& [t, k] : store.relation("pseudo_map").rows)
      if (t[0].as_atom() == f.name && t[3].as_atom() == "use" &&
          is_float_reg(t[2].as_reg()))
        pinned.insert(static_cast<Pseudo>(t[4].as_int()));

    std::vector<char> alive(g.nodes.size(), 1);
    std::map<Pseudo, Pseudo> alias;
    auto resolve = [&](Pseudo p) {
      while (alias.count(p)) p = alias.at(p);
      return p;
    };

    for (int round = 0; round < 100; ++round) {
      bool changed = false;

      // Count definitions and uses over live statements.
      std::map<Pseudo, int> def_count;
      std::map<Pseudo, int> use_count;
      for (size_t i = 0; i < g.nodes.size(); ++i) {
        if (!alive[i]) continue;
        for (const auto& s : g.stmts[i]) {
          if (auto d = stmt_def(s)) def_count[*d]++;
          for (auto u : stmt_uses(s)) use_count[u]++;
        }
      }

      // Live-range merge of unambiguous moves: d := s where both have a
      // single definition and d is not pinned. Copy propagation falls out of
      // the same rewrite.
      for (size_t i = 0; i < g.nodes.size() && !changed; ++i) {
        if (!alive[i] || g.stmts[i].size() != 1) continue;
        const auto* op = std::get_if<Iop>(&g.stmts[i][0]);
        if (!op || op->op.name != "Omove" || op->args.size() != 1) continue;
        Pseudo d = op->dst, s = op->args[0];
        if (d == s) {
          alive[i] = false;
          ctx.derive(pass, "node_role",
                     {vnode(g.nodes[i]), vatom("eliminated")},
                     {{"rtl_inst", {vnode(g.nodes[i]), g.first_val[i]}}});
          changed = true;
          break;
        }
        if (def_count[d] != 1 || def_count[s] > 1) continue;
        if (params.count(d) || pinned.count(d)) continue;
        alias[d] = s;
        alive[i] = false;
        ctx.derive(pass, "pseudo_alias", {vatom(f.name), vint(d), vint(s)},
                   {{"rtl_inst", {vnode(g.nodes[i]), g.first_val[i]}}});
        ctx.derive(pass, "node_role", {vnode(g.nodes[i]), vatom("eliminated")},
                   {{"rtl_inst", {vnode(g.nodes[i]), g.first_val[i]}}});
        for (auto& ss : g.stmts)
          for (auto& s2 : ss) s2 = substitute(s2, {{d, s}});
        changed = true;
      }
      if (changed) continue;

      // Dead stores: a pure Iop defining a pseudo nobody reads.
      for (size_t i = 0; i < g.nodes.size(); ++i) {
        if (!alive[i] || g.stmts[i].size() != 1) continue;
        const auto* op = std::get_if<Iop>(&g.stmts[i][0]);
        if (!op) continue;
        Pseudo d = op->dst;
        if (params.count(d) || pinned.count(d)) continue;
        if (use_count[d] > 0) continue;
        alive[i] = false;
        ctx.derive(pass, "node_role", {vnode(g.nodes[i]), vatom("eliminated")},
                   {{"rtl_inst", {vnode(g.nodes[i]), g.first_val[i]}}});
        changed = true;
      }
      if (!changed) break;
    }
    (void)resolve;

    for (size_t i = 0; i < g.nodes.size(); ++i) {
      if (!alive[i]) continue;
      for (const auto& s : g.stmts[i])
        ctx.derive(pass, "rtl_opt",
                   {vnode(g.nodes[i]), make_stmt(IrLevel::Rtl, s)},
                   {{"rtl_inst", {vnode(g.nodes[i]), g.first_val[i]}}});
    }
  }
}

}  // namespace

Pass make_rtl_optimize() {
  return make_procedural_pass(
      "rtl_optimize",
      {"rtl_inst", "rtl_succ", "func", "func_instr", "param_reg",
       "ret_pseudo", "pseudo_map"},
      {"rtl_opt", "pseudo_alias", "node_role"}, run_optimize);
}

}  // namespace reclift
