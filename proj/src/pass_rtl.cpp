#include <functional>

#include "pass_util.hpp"

// LTL -> RTL: a union-find over def-use chains groups physical-register uses
// into webs, each web becoming a pseudo-register; registerizable stack slots
// join the same scheme. Then the RTL optimizer: copy propagation, dead store
// elimination, and live-range merging to a fixpoint, emitting the optimized
// generation into rtl_opt.

namespace reclift {

using namespace detail;

namespace {

const std::vector<MachReg>& int_arg_regs() {
  static const std::vector<MachReg> r = {MachReg::DI, MachReg::SI,
                                         MachReg::DX, MachReg::CX,
                                         MachReg::R8, MachReg::R9};
  return r;
}
const std::vector<MachReg>& float_arg_regs() {
  static const std::vector<MachReg> r = {
      MachReg::X0, MachReg::X1, MachReg::X2, MachReg::X3,
      MachReg::X4, MachReg::X5, MachReg::X6, MachReg::X7};
  return r;
}

struct UnionFind {
  std::vector<size_t> parent;
  size_t add() {
    parent.push_back(parent.size());
    return parent.size() - 1;
  }
  size_t find(size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(size_t a, size_t b) { parent[find(a)] = find(b); }
};

struct RegEvent {
  MachReg reg;
  bool is_def = false;
};

// Register reads and writes of one LTL statement, in no particular order.
void reg_events(const LtlInst& s, std::vector<RegEvent>& out) {
  auto use = [&](MachReg r) { out.push_back({r, false}); };
  auto def = [&](MachReg r) { out.push_back({r, true}); };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Lgetstack>) {
          def(n.dst);
        } else if constexpr (std::is_same_v<T, Lsetstack>) {
          use(n.src);
        } else if constexpr (std::is_same_v<T, Lop>) {
          for (auto r : n.args) use(r);
          def(n.dst);
        } else if constexpr (std::is_same_v<T, Lload>) {
          for (auto r : n.args) use(r);
          def(n.dst);
        } else if constexpr (std::is_same_v<T, Lstore>) {
          for (auto r : n.args) use(r);
          use(n.src);
        } else if constexpr (std::is_same_v<T, Lcall>) {
          for (auto r : int_arg_regs()) use(r);
          for (auto r : float_arg_regs()) use(r);
          def(MachReg::AX);
          def(MachReg::DX);
          def(MachReg::X0);
        } else if constexpr (std::is_same_v<T, Lcond>) {
          for (auto r : n.args) use(r);
        } else if constexpr (std::is_same_v<T, Lreturn>) {
          // Return values are resolved from reaching definitions at the
          // exits, not from synthetic uses.
        } else if constexpr (std::is_same_v<T, Lbuiltin>) {
          for (auto r : n.args) use(r);
          if (n.dst) def(*n.dst);
        }
      },
      s);
}

struct FnGraph {
  std::vector<NodeId> nodes;  // address order, synthetics included
  std::map<uint64_t, size_t> index;
  std::vector<std::vector<size_t>> succs, preds;
  std::vector<std::vector<LtlInst>> stmts;  // candidates per node
  std::vector<Value> stmt_vals;             // first candidate value per node
};

FnGraph fn_graph(const Store& store, const std::string& fname) {
  FnGraph g;
  std::set<uint64_t> members;
  for (const auto& [t, k] : store.relation("func_instr").rows)
    if (t[0].as_atom() == fname) members.insert(t[1].as_node().value);
  for (uint64_t v : members) {
    NodeId n{v};
    auto cands = store.candidates(IrLevel::Ltl, n);
    if (cands.empty()) continue;
    g.index[v] = g.nodes.size();
    g.nodes.push_back(n);
    std::vector<LtlInst> ss;
    for (const auto& [sv, ann] : cands)
      if (const auto* l = as_ltl(sv)) ss.push_back(*l);
    g.stmts.push_back(std::move(ss));
    g.stmt_vals.push_back(cands[0].first);
  }
  g.succs.resize(g.nodes.size());
  g.preds.resize(g.nodes.size());
  for (const auto& [t, k] : store.relation("ltl_succ").rows) {
    auto a = g.index.find(t[0].as_node().value);
    auto b = g.index.find(t[1].as_node().value);
    if (a == g.index.end() || b == g.index.end()) continue;
    g.succs[a->second].push_back(b->second);
    g.preds[b->second].push_back(a->second);
  }
  return g;
}

struct Web {
  // Deterministic key: (first node value, reg or slot offset).
  uint64_t first_node = UINT64_MAX;
  int sort_reg = 0;
  bool is_param = false;
  int param_idx = -1;
  bool is_slot = false;
  int64_t slot_ofs = 0;
};

void run_recover(PassContext& ctx) {
  auto& store = ctx.store;
  const std::string pass = "recover_rtl";

  std::map<std::string, int64_t> frame_ok;
  for (const auto& [t, k] : store.relation("frame_info").rows)
    frame_ok[t[0].as_atom()] = t[2].as_int();

  // Address-taken and spill slot offsets per function.
  std::map<std::string, std::set<int64_t>> addr_taken, spill;
  for (const auto& [t, k] : store.relation("slot_desc").rows)
    if (t[4].as_int() == 1) spill[t[0].as_atom()].insert(t[1].as_int());

  for (const auto& f : function_views(store)) {
    if (!frame_ok.count(f.name) || frame_ok[f.name] != 1) continue;
    FnGraph g = fn_graph(store, f.name);
    if (g.nodes.empty()) continue;
    for (size_t i = 0; i < g.nodes.size(); ++i)
      for (const auto& s : g.stmts[i])
        if (const auto* op = std::get_if<Lop>(&s))
          if (op->op.name == "Oaddrstack" && op->op.imm)
            addr_taken[f.name].insert(*op->op.imm);

    // Definitions: one per (node, reg) write, plus virtual entry
    // definitions for the ABI argument registers.
    struct Def {
      size_t node = SIZE_MAX;  // SIZE_MAX: virtual entry def
      MachReg reg;
      int param_idx = -1;
    };
    std::vector<Def> defs;
    std::map<std::pair<size_t, int>, size_t> def_at;  // (node, reg) -> def id
    std::map<int, size_t> entry_def;                  // reg -> def id

    int pidx = 0;
    for (auto r : int_arg_regs()) {
      entry_def[static_cast<int>(r)] = defs.size();
      defs.push_back({SIZE_MAX, r, pidx++});
    }
    int fpidx = 0;
    for (auto r : float_arg_regs()) {
      entry_def[static_cast<int>(r)] = defs.size();
      defs.push_back({SIZE_MAX, r, 1000 + fpidx++});  // floats rank after ints
    }
    for (size_t i = 0; i < g.nodes.size(); ++i) {
      std::vector<RegEvent> evs;
      for (const auto& s : g.stmts[i]) reg_events(s, evs);
      for (const auto& ev : evs) {
        if (!ev.is_def) continue;
        auto key = std::make_pair(i, static_cast<int>(ev.reg));
        if (!def_at.count(key)) {
          def_at[key] = defs.size();
          defs.push_back({i, ev.reg, -1});
        }
      }
    }

    // Reaching definitions, iterated to a fixpoint over the CFG. The entry
    // node additionally sees the virtual parameter definitions.
    size_t nn = g.nodes.size(), nd = defs.size();
    std::vector<std::set<size_t>> in(nn), out(nn);
    std::optional<size_t> entry_idx;
    {
      for (const auto& [t, k] : store.relation("func_entry").rows)
        if (t[0].as_atom() == f.name) {
          auto it = g.index.find(t[1].as_node().value);
          if (it != g.index.end()) entry_idx = it->second;
        }
    }
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < nn; ++i) {
        std::set<size_t> newin;
        if (entry_idx && i == *entry_idx)
          for (const auto& [r, d] : entry_def) newin.insert(d);
        for (size_t p : g.preds[i])
          newin.insert(out[p].begin(), out[p].end());
        std::set<size_t> newout = newin;
        std::set<int> killed;
        for (const auto& [key, d] : def_at)
          if (key.first == i) killed.insert(key.second);
        for (auto it = newout.begin(); it != newout.end();) {
          if (killed.count(static_cast<int>(defs[*it].reg)) &&
              defs[*it].node != i)
            it = newout.erase(it);
          else
            ++it;
        }
        for (const auto& [key, d] : def_at)
          if (key.first == i) newout.insert(d);
        if (newin != in[i] || newout != out[i]) {
          in[i] = std::move(newin);
          out[i] = std::move(newout);
          changed = true;
        }
      }
    }

    // Webs: union each use with every definition reaching it.
    UnionFind uf;
    for (size_t d = 0; d < nd; ++d) uf.add();
    std::map<std::pair<size_t, int>, size_t> use_class;  // (node, reg) -> def
    for (size_t i = 0; i < nn; ++i) {
      std::vector<RegEvent> evs;
      for (const auto& s : g.stmts[i]) reg_events(s, evs);
      std::set<int> used;
      for (const auto& ev : evs)
        if (!ev.is_def) used.insert(static_cast<int>(ev.reg));
      for (int r : used) {
        std::vector<size_t> reaching;
        for (size_t d : in[i])
          if (static_cast<int>(defs[d].reg) == r) reaching.push_back(d);
        if (reaching.empty()) {
          // Dangling read; give it its own singleton definition.
          size_t d = defs.size();
          defs.push_back({i, static_cast<MachReg>(r), -1});
          uf.add();
          use_class[{i, r}] = d;
          continue;
        }
        for (size_t k = 1; k < reaching.size(); ++k)
          uf.unite(reaching[0], reaching[k]);
        use_class[{i, r}] = reaching[0];
      }
    }
    nd = defs.size();

    // Return register: prefer a float return (a non-call X0 definition
    // reaching every exit), then an integer AX return, else void. The
    // reaching definitions at each exit are united into one web, as a use
    // would have done.
    std::vector<size_t> exit_nodes;
    for (const auto& [t, k] : store.relation("func_exit").rows) {
      if (t[0].as_atom() != f.name) continue;
      auto it = g.index.find(t[1].as_node().value);
      if (it != g.index.end()) exit_nodes.push_back(it->second);
    }
    auto is_call_node = [&](size_t i) {
      for (const auto& s : g.stmts[i])
        if (std::holds_alternative<Lcall>(s)) return true;
      return false;
    };
    auto reaching_of = [&](size_t e, MachReg r, bool allow_call) {
      std::vector<size_t> ds;
      for (size_t d : in[e])
        if (defs[d].reg == r && defs[d].node != SIZE_MAX &&
            (allow_call || !is_call_node(defs[d].node)))
          ds.push_back(d);
      return ds;
    };
    std::optional<MachReg> ret_reg;
    std::map<size_t, size_t> exit_ret_def;
    if (!exit_nodes.empty()) {
      bool float_ok = true;
      for (size_t e : exit_nodes)
        if (reaching_of(e, MachReg::X0, false).empty()) float_ok = false;
      if (float_ok) {
        ret_reg = MachReg::X0;
      } else {
        bool int_ok = false;
        for (size_t e : exit_nodes)
          if (!reaching_of(e, MachReg::AX, true).empty()) int_ok = true;
        if (int_ok) ret_reg = MachReg::AX;
      }
    }
    if (ret_reg) {
      for (size_t e : exit_nodes) {
        auto ds = reaching_of(e, *ret_reg, true);
        if (ds.empty()) continue;
        for (size_t k = 1; k < ds.size(); ++k) uf.unite(ds[0], ds[k]);
        exit_ret_def[e] = ds[0];
      }
    }

    // Slot webs via the declarative def-use facts; address-taken and spill
    // slots stay in memory.
    struct SlotDef {
      int64_t ofs;
      size_t node;
    };
    std::vector<SlotDef> slot_defs;
    std::map<std::pair<int64_t, size_t>, size_t> slot_def_id;
    UnionFind suf;
    auto slot_excluded = [&](int64_t ofs) {
      return addr_taken[f.name].count(ofs) || spill[f.name].count(ofs);
    };
    for (const auto& [t, k] : store.relation("slot_def").rows) {
      if (t[0].as_atom() != f.name) continue;
      int64_t ofs = t[1].as_int();
      if (slot_excluded(ofs)) continue;
      auto it = g.index.find(t[2].as_node().value);
      if (it == g.index.end()) continue;
      slot_def_id[{ofs, it->second}] = slot_defs.size();
      slot_defs.push_back({ofs, it->second});
      suf.add();
    }
    std::map<std::pair<int64_t, size_t>, size_t> slot_use_class;
    for (const auto& [t, k] : store.relation("slot_def_use").rows) {
      if (t[0].as_atom() != f.name) continue;
      int64_t ofs = t[1].as_int();
      if (slot_excluded(ofs)) continue;
      auto d = g.index.find(t[2].as_node().value);
      auto u = g.index.find(t[3].as_node().value);
      if (d == g.index.end() || u == g.index.end()) continue;
      auto did = slot_def_id.find({ofs, d->second});
      if (did == slot_def_id.end()) continue;
      auto prev = slot_use_class.find({ofs, u->second});
      if (prev == slot_use_class.end())
        slot_use_class[{ofs, u->second}] = did->second;
      else
        suf.unite(prev->second, did->second);
    }

    // Deterministic pseudo numbering: reg webs then slot webs, ordered by
    // (first defining node, register / offset).
    std::map<size_t, Web> reg_webs;
    for (size_t d = 0; d < nd; ++d) {
      size_t c = uf.find(d);
      auto& w = reg_webs[c];
      uint64_t at = defs[d].node == SIZE_MAX
                        ? 0  // parameters sort first
                        : g.nodes[defs[d].node].value;
      if (at < w.first_node ||
          (at == w.first_node &&
           static_cast<int>(defs[d].reg) < w.sort_reg)) {
        w.first_node = at;
        w.sort_reg = static_cast<int>(defs[d].reg);
      }
      if (defs[d].param_idx >= 0) {
        w.is_param = true;
        w.param_idx = w.param_idx < 0
                          ? defs[d].param_idx
                          : std::min(w.param_idx, defs[d].param_idx);
      }
    }
    std::map<size_t, Web> slot_webs;
    for (size_t d = 0; d < slot_defs.size(); ++d) {
      size_t c = suf.find(d);
      auto& w = slot_webs[c];
      w.is_slot = true;
      w.slot_ofs = slot_defs[d].ofs;
      uint64_t at = g.nodes[slot_defs[d].node].value;
      if (at < w.first_node) w.first_node = at;
    }

    std::vector<std::pair<size_t, Web>> ordered;
    for (auto& [c, w] : reg_webs) ordered.push_back({c, w});
    for (auto& [c, w] : slot_webs) ordered.push_back({c, w});
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) {
                       if (a.second.first_node != b.second.first_node)
                         return a.second.first_node < b.second.first_node;
                       if (a.second.is_slot != b.second.is_slot)
                         return !a.second.is_slot;
                       if (a.second.is_slot)
                         return a.second.slot_ofs < b.second.slot_ofs;
                       return a.second.sort_reg < b.second.sort_reg;
                     });
    std::map<size_t, Pseudo> reg_pseudo, slot_pseudo;
    Pseudo next_p = 1;
    for (auto& [c, w] : ordered) {
      if (w.is_slot)
        slot_pseudo[c] = next_p++;
      else
        reg_pseudo[c] = next_p++;
    }

    auto use_p = [&](size_t node, MachReg r) -> std::optional<Pseudo> {
      auto it = use_class.find({node, static_cast<int>(r)});
      if (it == use_class.end()) return std::nullopt;
      return reg_pseudo.at(uf.find(it->second));
    };
    auto def_p = [&](size_t node, MachReg r) -> std::optional<Pseudo> {
      auto it = def_at.find({node, static_cast<int>(r)});
      if (it == def_at.end()) return std::nullopt;
      return reg_pseudo.at(uf.find(it->second));
    };
    // A use web is a plausible value source if it has a real definition or
    // is a parameter.
    auto qualified = [&](size_t node, MachReg r) {
      auto it = use_class.find({node, static_cast<int>(r)});
      if (it == use_class.end()) return false;
      size_t c = uf.find(it->second);
      for (size_t d = 0; d < nd; ++d) {
        if (uf.find(d) != c) continue;
        if (defs[d].node == SIZE_MAX) return true;  // parameter
        auto k = std::make_pair(defs[d].node, static_cast<int>(defs[d].reg));
        auto da = def_at.find(k);
        if (da != def_at.end() && da->second == d) return true;  // real write
      }
      return false;
    };

    // Emit pseudo_map facts.
    auto ltl_fact = [&](size_t i) {
      return std::make_pair(std::string("ltl_inst"),
                            Tuple{vnode(g.nodes[i]), g.stmt_vals[i]});
    };
    for (size_t i = 0; i < nn; ++i) {
      std::vector<RegEvent> evs;
      for (const auto& s : g.stmts[i]) reg_events(s, evs);
      std::set<std::pair<int, bool>> seen;
      for (const auto& ev : evs) {
        if (!seen.insert({static_cast<int>(ev.reg), ev.is_def}).second)
          continue;
        std::optional<Pseudo> p =
            ev.is_def ? def_p(i, ev.reg) : use_p(i, ev.reg);
        if (!p) continue;
        ctx.derive(pass, "pseudo_map",
                   {vatom(f.name), vnode(g.nodes[i]), Value::reg(ev.reg),
                    vatom(ev.is_def ? "def" : "use"), vint(*p)},
                   {ltl_fact(i)});
      }
    }

    // Parameter webs: contiguous integer prefix, then floats.
    int max_int_param = -1;
    std::map<int, Pseudo> param_ps;
    for (auto& [c, w] : reg_webs) {
      if (!w.is_param || !reg_pseudo.count(c)) continue;
      bool referenced = false;
      for (auto& [key, dc] : use_class)
        if (uf.find(dc) == uf.find(c)) referenced = true;
      if (!referenced) continue;
      param_ps[w.param_idx] = reg_pseudo.at(c);
      if (w.param_idx < 1000) max_int_param = std::max(max_int_param, w.param_idx);
    }
    int emitted = 0;
    for (int idx = 0; idx <= max_int_param; ++idx) {
      auto it = param_ps.find(idx);
      Pseudo p = it != param_ps.end() ? it->second : next_p++;
      ctx.derive(pass, "param_reg", {vatom(f.name), vint(emitted++), vint(p)},
                 {{"func", {vatom(f.name), vnode(f.entry)}}});
    }
    for (auto& [idx, p] : param_ps) {
      if (idx < 1000) continue;
      ctx.derive(pass, "param_reg", {vatom(f.name), vint(emitted++), vint(p)},
                 {{"func", {vatom(f.name), vnode(f.entry)}}});
    }

    std::map<size_t, Pseudo> exit_ret_pseudo;
    for (auto& [e, d] : exit_ret_def)
      exit_ret_pseudo[e] = reg_pseudo.at(uf.find(d));

    // RTL statements.
    auto slot_use_p = [&](size_t node, int64_t ofs) -> std::optional<Pseudo> {
      auto it = slot_use_class.find({ofs, node});
      if (it == slot_use_class.end()) return std::nullopt;
      return slot_pseudo.at(suf.find(it->second));
    };
    auto slot_def_p = [&](size_t node, int64_t ofs) -> std::optional<Pseudo> {
      auto it = slot_def_id.find({ofs, node});
      if (it == slot_def_id.end()) return std::nullopt;
      return slot_pseudo.at(suf.find(it->second));
    };
    auto chunk_of_ty = [](MachTy ty) {
      switch (ty) {
        case MachTy::Tint:
          return Chunk::MInt32;
        case MachTy::Tsingle:
          return Chunk::MFloat32;
        case MachTy::Tfloat:
          return Chunk::MFloat64;
        default:
          return Chunk::MInt64;
      }
    };

    for (size_t i = 0; i < nn; ++i) {
      for (const auto& s : g.stmts[i]) {
        std::optional<RtlInst> out;
        std::visit(
            [&](const auto& n) {
              using T = std::decay_t<decltype(n)>;
              auto u = [&](MachReg r) { return use_p(i, r).value_or(0); };
              auto d = [&](MachReg r) { return def_p(i, r).value_or(0); };
              auto us = [&](const std::vector<MachReg>& rs) {
                std::vector<Pseudo> ps;
                for (auto r : rs) ps.push_back(u(r));
                return ps;
              };
              if constexpr (std::is_same_v<T, Lgetstack>) {
                if (slot_excluded(n.ofs)) {
                  out = RtlInst{Iload{chunk_of_ty(n.ty),
                                      Addressing::stack(n.ofs),
                                      {},
                                      d(n.dst)}};
                } else if (auto sp = slot_use_p(i, n.ofs)) {
                  out = RtlInst{
                      Iop{OpCode::simple("Omove"), {*sp}, d(n.dst)}};
                } else {
                  out = RtlInst{Iload{chunk_of_ty(n.ty),
                                      Addressing::stack(n.ofs),
                                      {},
                                      d(n.dst)}};
                }
              } else if constexpr (std::is_same_v<T, Lsetstack>) {
                if (!slot_excluded(n.ofs)) {
                  if (auto sp = slot_def_p(i, n.ofs)) {
                    out = RtlInst{
                        Iop{OpCode::simple("Omove"), {u(n.src)}, *sp}};
                    return;
                  }
                }
                out = RtlInst{Istore{chunk_of_ty(n.ty),
                                     Addressing::stack(n.ofs),
                                     {},
                                     u(n.src)}};
              } else if constexpr (std::is_same_v<T, Lop>) {
                out = RtlInst{Iop{n.op, us(n.args), d(n.dst)}};
              } else if constexpr (std::is_same_v<T, Lload>) {
                out = RtlInst{Iload{n.chunk, n.addr, us(n.args), d(n.dst)}};
              } else if constexpr (std::is_same_v<T, Lstore>) {
                out = RtlInst{Istore{n.chunk, n.addr, us(n.args), u(n.src)}};
              } else if constexpr (std::is_same_v<T, Lcall>) {
                std::vector<Pseudo> args;
                for (auto r : int_arg_regs())
                  if (qualified(i, r)) args.push_back(u(r));
                for (auto r : float_arg_regs())
                  if (qualified(i, r)) args.push_back(u(r));
                out = RtlInst{Icall{n.target, args, def_p(i, MachReg::AX)}};
              } else if constexpr (std::is_same_v<T, Lcond>) {
                out = RtlInst{Icond{n.cond, n.width, us(n.args), n.imm,
                                    n.iftrue, n.iffalse}};
              } else if constexpr (std::is_same_v<T, Lreturn>) {
                std::optional<Pseudo> rv;
                auto rit = exit_ret_pseudo.find(i);
                if (rit != exit_ret_pseudo.end()) rv = rit->second;
                out = RtlInst{Ireturn{rv}};
              } else if constexpr (std::is_same_v<T, Lbuiltin>) {
                std::optional<Pseudo> dst;
                if (n.dst) dst = d(*n.dst);
                out = RtlInst{Ibuiltin{n.name, us(n.args), dst}};
              }
            },
            s);
        if (out)
          ctx.derive(pass, "rtl_inst",
                     {vnode(g.nodes[i]), make_stmt(IrLevel::Rtl, *out)},
                     {ltl_fact(i)});
      }
      // Return-value webs for the float path are recorded via pseudo_map.
    }

    // ret_pseudo rows, one per distinct return web.
    {
      std::set<Pseudo> seen;
      for (auto& [e, p] : exit_ret_pseudo)
        if (seen.insert(p).second)
          ctx.derive(pass, "ret_pseudo", {vatom(f.name), vint(p)},
                     {ltl_fact(e)});
    }

    // Typed slot reloads witness the web's type: a Tlong read of an any64
    // store marks the slot web long.
    for (size_t i = 0; i < nn; ++i) {
      for (const auto& s : g.stmts[i]) {
        const auto* get = std::get_if<Lgetstack>(&s);
        if (!get || slot_excluded(get->ofs)) continue;
        auto sp = slot_use_p(i, get->ofs);
        if (!sp) continue;
        TypeRef ty;
        switch (get->ty) {
          case MachTy::Tint:
            ty = ctx.types.int_type(32, true);
            break;
          case MachTy::Tlong:
            ty = ctx.types.long_type(true);
            break;
          case MachTy::Tsingle:
            ty = ctx.types.float_type(32);
            break;
          case MachTy::Tfloat:
            ty = ctx.types.float_type(64);
            break;
          default:
            break;
        }
        if (ty)
          ctx.derive(pass, "type_evidence",
                     {pseudo_subject(f.name, *sp), Value::type(ty),
                      Value::atom("opcode")},
                     {ltl_fact(i)});
      }
    }
  }

  // Edges carry over.
  for (const auto& [t, k] : store.relation("ltl_succ").rows)
    ctx.derive(pass, "rtl_succ", t, {{"ltl_succ", t}});
}

}  // namespace

Pass make_recover_rtl() {
  return make_procedural_pass(
      "recover_rtl",
      {"ltl_inst", "ltl_succ", "func", "func_instr", "func_entry",
       "func_exit", "frame_info", "slot_desc", "slot_def", "slot_def_use"},
      {"rtl_inst", "rtl_succ", "pseudo_map", "param_reg", "ret_pseudo",
       "type_evidence"},
      run_recover);
}

}  // namespace reclift
