#include "pass_util.hpp"

// Mach -> LTL: stack accesses become typed slot descriptors, SP-relative
// offsets are rebased onto BP, everything else maps structurally. Plus the
// slot def/use/reach analysis.

namespace reclift {

using namespace detail;

namespace {

int machty_width(MachTy t) {
  switch (t) {
    case MachTy::Tint:
    case MachTy::Tsingle:
    case MachTy::Tany32:
      return 4;
    default:
      return 8;
  }
}

const MachInst& env_mach(const RuleEnv& env, Var v) {
  const MachInst* m = as_mach(env[v]);
  if (!m) throw EngineError("expected a Mach statement");
  return *m;
}

struct SlotView {
  SlotKind kind;
  int64_t ofs;  // BP-based
};

// BP rebasing: SP+k equals BP-(frame_size-k). Offsets at or above +16 are
// incoming arguments; SP-relative slots in calling functions are outgoing.
SlotView normalize_slot(StackBase base, int64_t ofs, int64_t frame_size,
                        bool has_call) {
  if (base == StackBase::SP) {
    int64_t rebased = ofs - frame_size;
    return {has_call ? SlotKind::Outgoing : SlotKind::Local, rebased};
  }
  if (ofs >= 16) return {SlotKind::Incoming, ofs};
  return {SlotKind::Local, ofs};
}

// Structural Mach -> LTL mapping for the non-stack constructors.
std::optional<LtlInst> map_structural(const MachInst& m) {
  if (const auto* op = std::get_if<Mop>(&m))
    return LtlInst{Lop{op->op, op->args, op->dst}};
  if (const auto* ld = std::get_if<Mload>(&m))
    return LtlInst{Lload{ld->chunk, ld->addr, ld->args, ld->dst}};
  if (const auto* st = std::get_if<Mstore>(&m))
    return LtlInst{Lstore{st->chunk, st->addr, st->args, st->src}};
  if (const auto* c = std::get_if<Mcall>(&m)) return LtlInst{Lcall{c->target}};
  if (const auto* c = std::get_if<Mcond>(&m))
    return LtlInst{
        Lcond{c->cond, c->width, c->args, c->imm, c->iftrue, c->iffalse}};
  if (std::get_if<Mreturn>(&m)) return LtlInst{Lreturn{}};
  if (const auto* b = std::get_if<Mbuiltin>(&m))
    return LtlInst{Lbuiltin{b->name, b->args, b->dst}};
  return std::nullopt;
}

std::vector<Rule> normalize_rules() {
  std::vector<Rule> rules;

  // ltl(N, S') <- mach_inst(N, S), func_instr(F, N), frame_info(F, SZ, 1, HC)
  auto framed_rule = [](const std::string& id,
                        std::function<std::optional<Value>(
                            const MachInst&, int64_t frame, bool has_call)>
                            build,
                        const std::string& head_rel,
                        const std::string& note) {
    RuleBuilder rb(id);
    auto n = rb.var("N"), s = rb.var("S"), f = rb.var("F"), sz = rb.var("SZ"),
         hc = rb.var("HC"), out = rb.var("OUT");
    rb.match("mach_inst", {n, s})
        .match("func_instr", {f, n})
        .match("frame_info", {f, sz, Value::integer(1), hc})
        .when(
            [s, sz, hc, build](const RuleEnv& e) {
              return build(env_mach(e, s), e[sz].as_int(),
                           e[hc].as_int() != 0)
                  .has_value();
            },
            note)
        .bind(out,
              [s, sz, hc, build](const RuleEnv& e) {
                return *build(env_mach(e, s), e[sz].as_int(),
                              e[hc].as_int() != 0);
              },
              "normalize(S)")
        .derive(head_rel, {n, out});
    return rb.build();
  };

  rules.push_back(framed_rule(
      "ltl/setstack",
      [](const MachInst& m, int64_t frame,
         bool has_call) -> std::optional<Value> {
        const auto* ss = std::get_if<Msetstack>(&m);
        if (!ss) return std::nullopt;
        auto sv = normalize_slot(ss->base, ss->ofs, frame, has_call);
        return make_stmt(IrLevel::Ltl,
                         LtlInst{Lsetstack{ss->src, sv.kind, sv.ofs, ss->ty}});
      },
      "ltl_inst", "stack store"));

  rules.push_back(framed_rule(
      "ltl/getstack",
      [](const MachInst& m, int64_t frame,
         bool has_call) -> std::optional<Value> {
        const auto* gs = std::get_if<Mgetstack>(&m);
        if (!gs) return std::nullopt;
        auto sv = normalize_slot(gs->base, gs->ofs, frame, has_call);
        return make_stmt(IrLevel::Ltl,
                         LtlInst{Lgetstack{sv.kind, sv.ofs, gs->ty, gs->dst}});
      },
      "ltl_inst", "stack load"));

  rules.push_back(framed_rule(
      "ltl/structural",
      [](const MachInst& m, int64_t, bool) -> std::optional<Value> {
        auto mapped = map_structural(m);
        if (!mapped) return std::nullopt;
        return make_stmt(IrLevel::Ltl, *mapped);
      },
      "ltl_inst", "structural map"));

  // Slot descriptors, one per access.
  auto slot_rule = [](const std::string& id, bool is_store) {
    RuleBuilder rb(id);
    auto n = rb.var("N"), s = rb.var("S"), f = rb.var("F"), sz = rb.var("SZ"),
         hc = rb.var("HC"), ofs = rb.var("OFS"), kind = rb.var("KIND"),
         width = rb.var("WIDTH");
    rb.match("mach_inst", {n, s})
        .match("func_instr", {f, n})
        .match("frame_info", {f, sz, Value::integer(1), hc})
        .when(
            [s, is_store](const RuleEnv& e) {
              const auto& m = env_mach(e, s);
              return is_store ? std::get_if<Msetstack>(&m) != nullptr
                              : std::get_if<Mgetstack>(&m) != nullptr;
            },
            is_store ? "is stack store" : "is stack load")
        .bind(ofs,
              [s, sz, hc, is_store](const RuleEnv& e) {
                const auto& m = env_mach(e, s);
                auto [base, o, ty] = [&] {
                  if (const auto* ss = std::get_if<Msetstack>(&m))
                    return std::tuple{ss->base, ss->ofs, ss->ty};
                  const auto& gs = std::get<Mgetstack>(m);
                  return std::tuple{gs.base, gs.ofs, gs.ty};
                }();
                (void)ty;
                return Value::integer(normalize_slot(base, o, e[sz].as_int(),
                                                     e[hc].as_int() != 0)
                                          .ofs);
              },
              "BP-based offset")
        .bind(kind,
              [s, sz, hc](const RuleEnv& e) {
                const auto& m = env_mach(e, s);
                auto [base, o] = [&] {
                  if (const auto* ss = std::get_if<Msetstack>(&m))
                    return std::pair{ss->base, ss->ofs};
                  const auto& gs = std::get<Mgetstack>(m);
                  return std::pair{gs.base, gs.ofs};
                }();
                return Value::atom(to_string(
                    normalize_slot(base, o, e[sz].as_int(),
                                   e[hc].as_int() != 0)
                        .kind));
              },
              "slot kind")
        .bind(width,
              [s](const RuleEnv& e) {
                const auto& m = env_mach(e, s);
                MachTy ty = std::holds_alternative<Msetstack>(m)
                                ? std::get<Msetstack>(m).ty
                                : std::get<Mgetstack>(m).ty;
                return Value::integer(machty_width(ty));
              },
              "width")
        .derive("slot_desc", {f, ofs, kind, width, Value::integer(0)});
    return rb.build();
  };
  rules.push_back(slot_rule("ltl/slot_of_store", true));
  rules.push_back(slot_rule("ltl/slot_of_load", false));

  // Edges carry over unchanged for frame-ok functions.
  {
    RuleBuilder rb("ltl/succ");
    auto a = rb.var("A"), b = rb.var("B"), k = rb.var("K"), f = rb.var("F"),
         sz = rb.var("SZ"), hc = rb.var("HC");
    rb.match("mach_succ", {a, b, k})
        .match("func_instr", {f, a})
        .match("frame_info", {f, sz, Value::integer(1), hc})
        .derive("ltl_succ", {a, b, k});
    rules.push_back(rb.build());
  }

  return rules;
}

}  // namespace

Pass make_normalize_ltl(CTypeTable&) {
  return make_pass("normalize_ltl",
                   {"mach_inst", "mach_succ", "func_instr", "frame_info"},
                   {"ltl_inst", "ltl_succ", "slot_desc"}, normalize_rules());
}

// ---- slot def/use analysis -------------------------------------------------------

namespace {

const LtlInst& env_ltl(const RuleEnv& env, Var v) {
  const LtlInst* l = as_ltl(env[v]);
  if (!l) throw EngineError("expected an LTL statement");
  return *l;
}

bool defines_slot(const LtlInst& s, int64_t ofs) {
  const auto* set = std::get_if<Lsetstack>(&s);
  return set && set->ofs == ofs;
}

bool uses_slot(const LtlInst& s, int64_t ofs) {
  const auto* get = std::get_if<Lgetstack>(&s);
  return get && get->ofs == ofs;
}

std::vector<Rule> slot_rules() {
  std::vector<Rule> rules;
  {
    RuleBuilder rb("slots/def");
    auto n = rb.var("N"), s = rb.var("S"), f = rb.var("F"), ofs = rb.var("OFS");
    rb.match("ltl_inst", {n, s})
        .when([s](const RuleEnv& e) {
          return std::holds_alternative<Lsetstack>(env_ltl(e, s));
        }, "is slot store")
        .match("func_instr", {f, n})
        .bind(ofs,
              [s](const RuleEnv& e) {
                return Value::integer(std::get<Lsetstack>(env_ltl(e, s)).ofs);
              },
              "slot offset")
        .derive("slot_def", {f, ofs, n});
    rules.push_back(rb.build());
  }
  {
    RuleBuilder rb("slots/use");
    auto n = rb.var("N"), s = rb.var("S"), f = rb.var("F"), ofs = rb.var("OFS");
    rb.match("ltl_inst", {n, s})
        .when([s](const RuleEnv& e) {
          return std::holds_alternative<Lgetstack>(env_ltl(e, s));
        }, "is slot load")
        .match("func_instr", {f, n})
        .bind(ofs,
              [s](const RuleEnv& e) {
                return Value::integer(std::get<Lgetstack>(env_ltl(e, s)).ofs);
              },
              "slot offset")
        .derive("slot_use", {f, ofs, n});
    rules.push_back(rb.build());
  }
  {
    RuleBuilder rb("slots/reach_base");
    auto f = rb.var("F"), ofs = rb.var("OFS"), d = rb.var("D"), n = rb.var("N"),
         k = rb.var("K");
    rb.match("slot_def", {f, ofs, d})
        .match("ltl_succ", {d, n, k})
        .derive("slot_reach", {f, ofs, d, n});
    rules.push_back(rb.build());
  }
  {
    RuleBuilder rb("slots/reach_step");
    auto f = rb.var("F"), ofs = rb.var("OFS"), d = rb.var("D"), k = rb.var("K"),
         s = rb.var("S"), n = rb.var("N"), ek = rb.var("EK");
    rb.match("slot_reach", {f, ofs, d, k})
        .match("ltl_inst", {k, s})
        .when(
            [s, ofs](const RuleEnv& e) {
              return !defines_slot(env_ltl(e, s), e[ofs].as_int());
            },
            "no intervening store")
        .match("ltl_succ", {k, n, ek})
        .derive("slot_reach", {f, ofs, d, n});
    rules.push_back(rb.build());
  }
  {
    RuleBuilder rb("slots/defuse");
    auto f = rb.var("F"), ofs = rb.var("OFS"), d = rb.var("D"), u = rb.var("U"),
         s = rb.var("S");
    rb.match("slot_reach", {f, ofs, d, u})
        .match("ltl_inst", {u, s})
        .when(
            [s, ofs](const RuleEnv& e) {
              return uses_slot(env_ltl(e, s), e[ofs].as_int());
            },
            "slot read")
        .derive("slot_def_use", {f, ofs, d, u});
    rules.push_back(rb.build());
  }
  return rules;
}

}  // namespace

Pass make_slot_analysis() {
  return make_pass("slot_analysis",
                   {"ltl_inst", "ltl_succ", "func_instr", "slot_def",
                    "slot_reach"},
                   {"slot_def", "slot_use", "slot_reach", "slot_def_use"},
                   slot_rules());
}

Pass make_slot_dead() {
  return make_procedural_pass(
      "slot_dead", {"slot_def", "slot_def_use"}, {"slot_dead"},
      [](PassContext& ctx) {
        std::set<Tuple, TupleLess> live;
        for (const auto& [t, k] : ctx.store.relation("slot_def_use").rows)
          live.insert({t[0], t[1], t[2]});
        for (const auto& [t, k] : ctx.store.relation("slot_def").rows) {
          if (live.count(t)) continue;
          ctx.derive("slot_dead", "slot_dead", t, {{"slot_def", t}});
        }
      });
}

}  // namespace reclift
