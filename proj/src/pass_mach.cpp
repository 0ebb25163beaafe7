#include <sstream>

#include "pass_util.hpp"

// Asm -> Mach: frame recognition, mnemonic lifting rules, alloca
// recognition, node-conservation diagnostics, and CFG construction.

namespace reclift {

using namespace detail;

namespace {

constexpr const char* kRoles[] = {"prologue", "epilogue", "ignored",
                                  "fused-flags", "fused", "jump",
                                  "eliminated"};

bool is_callee_save(MachReg r) {
  switch (r) {
    case MachReg::BX:
    case MachReg::R12:
    case MachReg::R13:
    case MachReg::R14:
    case MachReg::R15:
      return true;
    default:
      return false;
  }
}

Tuple instr_fact(const Store& store, NodeId n) {
  const auto& rel = store.relation("instr");
  Tuple probe{vnode(n)};
  auto it = rel.rows.lower_bound(probe);
  if (it == rel.rows.end() || !(it->first[0] == probe[0]))
    throw EngineError("no instr fact at node");
  return it->first;
}

}  // namespace

bool skippable_role(const std::string& role) {
  for (const char* r : kRoles)
    if (role == r) return true;
  return false;
}

std::vector<detail::FuncView> detail::function_views(const Store& store) {
  std::map<std::string, FuncView> by_name;
  for (const auto& [t, ann] : store.relation("func").rows) {
    FuncView v;
    v.name = t[0].as_atom();
    v.entry = t[1].as_node();
    by_name.emplace(v.name, std::move(v));
  }
  for (const auto& [t, ann] : store.relation("func_instr").rows) {
    auto it = by_name.find(t[0].as_atom());
    if (it == by_name.end()) continue;
    NodeId n = t[1].as_node();
    if (n.is_synthetic()) continue;
    auto cands = store.candidates(IrLevel::X86Asm, n);
    if (cands.empty()) continue;
    const auto* a = as_asm(cands[0].first);
    if (!a) continue;
    it->second.lines.emplace_back(n, *a);
  }
  std::vector<FuncView> out;
  for (auto& [name, v] : by_name) {
    std::sort(v.lines.begin(), v.lines.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    out.push_back(std::move(v));
  }
  std::sort(out.begin(), out.end(),
            [](const FuncView& a, const FuncView& b) {
              return a.entry < b.entry;
            });
  return out;
}

// ---- mach_prep -----------------------------------------------------------------

namespace {

void run_mach_prep(PassContext& ctx) {
  auto& store = ctx.store;
  const std::string pass = "mach_prep";
  for (const auto& f : function_views(store)) {
    std::map<uint64_t, std::string> roles;
    auto role = [&](NodeId n, const std::string& r) {
      roles[n.value] = r;
      ctx.derive(pass, "node_role", {vnode(n), vatom(r)},
                 {{"instr", instr_fact(store, n)}});
    };
    auto diag = [&](NodeId n, const std::string& cat, const std::string& msg) {
      ctx.derive(pass, "diag", {vnode(n), vatom(cat), vatom(msg)},
                 {{"instr", instr_fact(store, n)}});
    };

    const auto& ls = f.lines;
    bool touches_frame = false;
    bool has_call = false;
    for (const auto& [n, a] : ls)
      if (is_stem(a, "call")) has_call = true;
    for (const auto& [n, a] : ls) {
      for (const auto& op : a.operands)
        if (is_stack_mem(op) ||
            (is_reg(op) && is_frame_reg_name(op.reg) && !is_stem(a, "push") &&
             !is_stem(a, "pop")))
          touches_frame = true;
      if (is_stem(a, "push") || is_stem(a, "pop")) touches_frame = true;
    }

    // Ignored filler.
    for (const auto& [n, a] : ls) {
      auto info = classify_mnemonic(a.mnemonic);
      if (info.supported && info.ignored) role(n, "ignored");
      if (!info.supported) diag(n, "unsupported", a.mnemonic);
    }

    // Prologue: optional endbr64, push %rbp, mov %rsp,%rbp, callee-save
    // pushes, optional sub $N,%rsp.
    size_t i = 0;
    while (i < ls.size() && roles.count(ls[i].first.value)) ++i;
    int64_t frame_size = 0;
    bool frame_ok = false;
    bool framed = false;
    if (i + 1 < ls.size() && is_stem(ls[i].second, "push") &&
        ls[i].second.operands.size() == 1 &&
        is_reg(ls[i].second.operands[0]) &&
        ls[i].second.operands[0].reg == "rbp" &&
        is_stem(ls[i + 1].second, "mov") &&
        ls[i + 1].second.operands.size() == 2 &&
        is_reg(ls[i + 1].second.operands[0]) &&
        ls[i + 1].second.operands[0].reg == "rsp" &&
        is_reg(ls[i + 1].second.operands[1]) &&
        ls[i + 1].second.operands[1].reg == "rbp") {
      role(ls[i].first, "prologue");
      role(ls[i + 1].first, "prologue");
      i += 2;
      framed = true;
      frame_ok = true;
      int64_t spill_at = -8;
      while (i < ls.size() && is_stem(ls[i].second, "push") &&
             ls[i].second.operands.size() == 1 &&
             is_data_reg(ls[i].second.operands[0]) &&
             is_callee_save(reg_of(ls[i].second.operands[0]))) {
        role(ls[i].first, "prologue");
        ctx.derive(pass, "slot_desc",
                   {vatom(f.name), vint(spill_at), vatom("Local"), vint(8),
                    vint(1)},
                   {{"instr", instr_fact(store, ls[i].first)}});
        spill_at -= 8;
        ++i;
      }
      if (i < ls.size() && is_stem(ls[i].second, "sub") &&
          ls[i].second.operands.size() == 2 &&
          is_imm(ls[i].second.operands[0]) &&
          is_reg(ls[i].second.operands[1]) &&
          ls[i].second.operands[1].reg == "rsp") {
        frame_size = ls[i].second.operands[0].imm;
        role(ls[i].first, "prologue");
        ++i;
      }
    } else if (!touches_frame) {
      frame_ok = true;  // frameless leaf
    }
    if (!frame_ok)
      diag(f.entry, "frame", "unrecognized frame setup in " + f.name +
                                 "; function skipped");

    // Epilogue: pops and frame restores feeding each ret.
    for (size_t k = 0; k < ls.size(); ++k) {
      if (!is_stem(ls[k].second, "ret")) continue;
      size_t j = k;
      while (j > 0) {
        const auto& [pn, pa] = ls[j - 1];
        bool restore =
            (is_stem(pa, "pop")) ||
            (is_stem(pa, "mov") && pa.operands.size() == 2 &&
             is_reg(pa.operands[0]) && pa.operands[0].reg == "rbp" &&
             is_reg(pa.operands[1]) && pa.operands[1].reg == "rsp") ||
            (is_stem(pa, "add") && pa.operands.size() == 2 &&
             is_imm(pa.operands[0]) && is_reg(pa.operands[1]) &&
             pa.operands[1].reg == "rsp");
        if (!restore || roles.count(pn.value)) break;
        role(pn, "epilogue");
        --j;
      }
    }

    // Flag fusion roles, jump roles, stray stack ops, idiv split nodes.
    for (size_t k = 0; k < ls.size(); ++k) {
      const auto& [n, a] = ls[k];
      if (roles.count(n.value)) continue;
      auto stem = stem_of(a);
      if (stem == "cmp" || stem == "test") {
        role(n, "fused-flags");
      } else if (stem == "cdq" || stem == "cqo") {
        role(n, "fused");
      } else if (stem == "jmp" && !a.operands.empty() &&
                 is_imm(a.operands[0])) {
        role(n, "jump");
      } else if (stem == "jmp") {
        diag(n, "unsupported", "indirect jump");
      } else if (stem == "push" || stem == "pop") {
        diag(n, "unsupported", "dynamic stack op outside prologue");
      } else if (stem == "idiv" && a.operands.size() == 1 &&
                 is_data_reg(a.operands[0])) {
        NodeId s = store.alloc_synthetic();
        ctx.derive(pass, "syn_node", {vnode(n), vnode(s)},
                   {{"instr", instr_fact(store, n)}});
        ctx.derive(pass, "func_instr", {vatom(f.name), vnode(s)},
                   {{"instr", instr_fact(store, n)}});
      }
    }

    ctx.derive(pass, "frame_info",
               {vatom(f.name), vint(frame_size), vint(frame_ok ? 1 : 0),
                vint(has_call ? 1 : 0)},
               {{"func", {vatom(f.name), vnode(f.entry)}}});
  }
}

}  // namespace

Pass make_mach_prep() {
  return make_procedural_pass(
      "mach_prep", {"instr", "func", "func_instr", "instr_next"},
      {"node_role", "frame_info", "syn_node", "slot_desc", "diag",
       "func_instr"},
      run_mach_prep);
}

// ---- lift_mach -----------------------------------------------------------------

namespace {

const AsmInst& env_asm(const RuleEnv& env, Var v) {
  const AsmInst* a = as_asm(env[v]);
  if (!a) throw EngineError("expected an x86Asm statement");
  return *a;
}

// Shorthand for the common single-guard, single-compute lifting rule:
// mach_inst(N, S) <- instr(N, A), {guard(A)}, {S := build(A)}.
Rule lift_rule(const std::string& id,
               std::function<bool(const AsmInst&)> guard,
               std::function<MachInst(const AsmInst&)> build,
               const std::string& note) {
  RuleBuilder rb(id);
  auto n = rb.var("N"), a = rb.var("A"), s = rb.var("S");
  rb.match("instr", {n, a})
      .when([guard, a](const RuleEnv& e) { return guard(env_asm(e, a)); },
            note)
      .bind(s,
            [build, a](const RuleEnv& e) {
              return make_stmt(IrLevel::Mach, build(env_asm(e, a)));
            },
            "lift(A)")
      .derive("mach_inst", {n, s});
  return rb.build();
}

bool plain_mov(const AsmInst& a) {
  auto stem = stem_of(a);
  return stem == "mov" || stem == "movss" || stem == "movsd";
}

bool any_mov_load(const AsmInst& a) {
  auto stem = stem_of(a);
  if (plain_mov(a)) return true;
  static const std::set<std::string> ext = {
      "movzbw", "movzbl", "movzbq", "movzwl", "movzwq", "movsbw",
      "movsbl", "movsbq", "movswl", "movswq", "movslq"};
  return ext.count(stem) > 0;
}

OpCode cast_op(const std::string& stem) {
  if (stem.rfind("movzb", 0) == 0) return OpCode::simple("Ocast8u");
  if (stem.rfind("movsb", 0) == 0) return OpCode::simple("Ocast8s");
  if (stem.rfind("movzw", 0) == 0) return OpCode::simple("Ocast16u");
  if (stem.rfind("movsw", 0) == 0) return OpCode::simple("Ocast16s");
  if (stem == "movslq") return OpCode::simple("Ocast32sl");
  throw IrError("not a cast mnemonic: " + stem);
}

std::string sized_op(const std::string& base, int width) {
  return width == 64 ? base + "l" : base;
}

StackBase stack_base(const AsmOperand& op) {
  return platform_reg(op.base)->reg == MachReg::SP ? StackBase::SP
                                                   : StackBase::BP;
}

std::vector<Rule> lift_mach_rules() {
  std::vector<Rule> rules;

  rules.push_back(lift_rule(
      "mach/store_stack",
      [](const AsmInst& a) {
        return plain_mov(a) && a.operands.size() == 2 &&
               is_data_reg(a.operands[0]) && is_stack_mem(a.operands[1]);
      },
      [](const AsmInst& a) {
        return MachInst{Msetstack{reg_of(a.operands[0]),
                                  stack_base(a.operands[1]),
                                  a.operands[1].imm, slot_store_ty(a)}};
      },
      "mov reg -> stack slot"));

  rules.push_back(lift_rule(
      "mach/load_stack",
      [](const AsmInst& a) {
        return plain_mov(a) && a.operands.size() == 2 &&
               is_stack_mem(a.operands[0]) && is_data_reg(a.operands[1]);
      },
      [](const AsmInst& a) {
        return MachInst{Mgetstack{stack_base(a.operands[0]),
                                  a.operands[0].imm, slot_load_ty(a),
                                  reg_of(a.operands[1])}};
      },
      "mov stack slot -> reg"));

  rules.push_back(lift_rule(
      "mach/load_mem",
      [](const AsmInst& a) {
        return any_mov_load(a) && a.operands.size() == 2 &&
               is_data_mem(a.operands[0]) && is_data_reg(a.operands[1]);
      },
      [](const AsmInst& a) {
        auto [addr, args] = memory_addressing(a.operands[0]);
        return MachInst{
            Mload{access_chunk(a), addr, args, reg_of(a.operands[1])}};
      },
      "mov mem -> reg"));

  rules.push_back(lift_rule(
      "mach/store_mem",
      [](const AsmInst& a) {
        return plain_mov(a) && a.operands.size() == 2 &&
               is_data_reg(a.operands[0]) && is_data_mem(a.operands[1]);
      },
      [](const AsmInst& a) {
        auto [addr, args] = memory_addressing(a.operands[1]);
        return MachInst{
            Mstore{access_chunk(a), addr, args, reg_of(a.operands[0])}};
      },
      "mov reg -> mem"));

  rules.push_back(lift_rule(
      "mach/const_reg",
      [](const AsmInst& a) {
        return is_stem(a, "mov") && a.operands.size() == 2 &&
               is_imm(a.operands[0]) && is_data_reg(a.operands[1]);
      },
      [](const AsmInst& a) {
        const char* op = op_width(a) == 64 ? "Olongconst" : "Ointconst";
        return MachInst{Mop{OpCode::with_imm(op, a.operands[0].imm),
                            {},
                            reg_of(a.operands[1])}};
      },
      "mov $imm -> reg"));

  rules.push_back(lift_rule(
      "mach/move_rr",
      [](const AsmInst& a) {
        return plain_mov(a) && a.operands.size() == 2 &&
               is_data_reg(a.operands[0]) && is_data_reg(a.operands[1]);
      },
      [](const AsmInst& a) {
        return MachInst{Mop{OpCode::simple("Omove"),
                            {reg_of(a.operands[0])},
                            reg_of(a.operands[1])}};
      },
      "mov reg -> reg"));

  rules.push_back(lift_rule(
      "mach/ext_rr",
      [](const AsmInst& a) {
        return any_mov_load(a) && !plain_mov(a) && a.operands.size() == 2 &&
               is_data_reg(a.operands[0]) && is_data_reg(a.operands[1]);
      },
      [](const AsmInst& a) {
        return MachInst{Mop{cast_op(stem_of(a)),
                            {reg_of(a.operands[0])},
                            reg_of(a.operands[1])}};
      },
      "movzx/movsx reg -> reg"));

  rules.push_back(lift_rule(
      "mach/binop_rr",
      [](const AsmInst& a) {
        auto stem = stem_of(a);
        static const std::set<std::string> ops = {"add", "sub", "imul",
                                                  "and", "or",  "xor"};
        return ops.count(stem) && a.operands.size() == 2 &&
               is_data_reg(a.operands[0]) && is_data_reg(a.operands[1]);
      },
      [](const AsmInst& a) {
        static const std::map<std::string, std::string> name = {
            {"add", "Oadd"}, {"sub", "Osub"}, {"imul", "Omul"},
            {"and", "Oand"}, {"or", "Oor"},   {"xor", "Oxor"}};
        MachReg dst = reg_of(a.operands[1]);
        return MachInst{
            Mop{OpCode::simple(sized_op(name.at(stem_of(a)), op_width(a))),
                {dst, reg_of(a.operands[0])},
                dst}};
      },
      "arith reg,reg"));

  // xor of a register with itself is also a zero constant; both readings
  // are kept as candidates.
  rules.push_back(lift_rule(
      "mach/xor_zero",
      [](const AsmInst& a) {
        return is_stem(a, "xor") && a.operands.size() == 2 &&
               is_data_reg(a.operands[0]) && is_data_reg(a.operands[1]) &&
               a.operands[0].reg == a.operands[1].reg;
      },
      [](const AsmInst& a) {
        const char* op = op_width(a) == 64 ? "Olongconst" : "Ointconst";
        return MachInst{
            Mop{OpCode::with_imm(op, 0), {}, reg_of(a.operands[1])}};
      },
      "xor reg,reg zero idiom"));

  rules.push_back(lift_rule(
      "mach/binop_imm",
      [](const AsmInst& a) {
        auto stem = stem_of(a);
        static const std::set<std::string> ops = {"add", "sub", "imul",
                                                  "and", "or",  "xor"};
        return ops.count(stem) && a.operands.size() == 2 &&
               is_imm(a.operands[0]) && is_data_reg(a.operands[1]);
      },
      [](const AsmInst& a) {
        static const std::map<std::string, std::string> name = {
            {"add", "Oadd"}, {"sub", "Osub"}, {"imul", "Omul"},
            {"and", "Oand"}, {"or", "Oor"},   {"xor", "Oxor"}};
        MachReg dst = reg_of(a.operands[1]);
        return MachInst{
            Mop{OpCode::with_imm(sized_op(name.at(stem_of(a)), op_width(a)),
                                 a.operands[0].imm),
                {dst},
                dst}};
      },
      "arith $imm,reg"));

  rules.push_back(lift_rule(
      "mach/shift_imm",
      [](const AsmInst& a) {
        auto stem = stem_of(a);
        return (stem == "shl" || stem == "shr" || stem == "sar") &&
               a.operands.size() == 2 && is_imm(a.operands[0]) &&
               is_data_reg(a.operands[1]);
      },
      [](const AsmInst& a) {
        static const std::map<std::string, std::string> name = {
            {"shl", "Oshl"}, {"shr", "Oshr"}, {"sar", "Osar"}};
        MachReg dst = reg_of(a.operands[1]);
        return MachInst{
            Mop{OpCode::with_imm(sized_op(name.at(stem_of(a)), op_width(a)),
                                 a.operands[0].imm),
                {dst},
                dst}};
      },
      "shift $imm,reg"));

  rules.push_back(lift_rule(
      "mach/shift_cl",
      [](const AsmInst& a) {
        auto stem = stem_of(a);
        return (stem == "shl" || stem == "shr" || stem == "sar") &&
               a.operands.size() == 2 && is_reg(a.operands[0]) &&
               a.operands[0].reg == "cl" && is_data_reg(a.operands[1]);
      },
      [](const AsmInst& a) {
        static const std::map<std::string, std::string> name = {
            {"shl", "Oshl"}, {"shr", "Oshr"}, {"sar", "Osar"}};
        MachReg dst = reg_of(a.operands[1]);
        return MachInst{
            Mop{OpCode::simple(sized_op(name.at(stem_of(a)), op_width(a))),
                {dst, MachReg::CX},
                dst}};
      },
      "shift %cl,reg"));

  rules.push_back(lift_rule(
      "mach/unop",
      [](const AsmInst& a) {
        auto stem = stem_of(a);
        return (stem == "not" || stem == "neg") && a.operands.size() == 1 &&
               is_data_reg(a.operands[0]);
      },
      [](const AsmInst& a) {
        MachReg dst = reg_of(a.operands[0]);
        const char* base = is_stem(a, "not") ? "Onot" : "Oneg";
        return MachInst{
            Mop{OpCode::simple(sized_op(base, op_width(a))), {dst}, dst}};
      },
      "not/neg reg"));

  rules.push_back(lift_rule(
      "mach/lea_stack",
      [](const AsmInst& a) {
        return is_stem(a, "lea") && a.operands.size() == 2 &&
               is_stack_mem(a.operands[0]) &&
               stack_base(a.operands[0]) == StackBase::BP &&
               is_data_reg(a.operands[1]);
      },
      [](const AsmInst& a) {
        return MachInst{
            Mop{OpCode::with_imm("Oaddrstack", a.operands[0].imm),
                {},
                reg_of(a.operands[1])}};
      },
      "lea stack slot address"));

  rules.push_back(lift_rule(
      "mach/lea_mem",
      [](const AsmInst& a) {
        return is_stem(a, "lea") && a.operands.size() == 2 &&
               is_data_mem(a.operands[0]) && a.operands[0].index.empty() &&
               a.operands[0].sym.empty() && is_data_reg(a.operands[1]);
      },
      [](const AsmInst& a) {
        return MachInst{Mop{OpCode::with_imm("Oaddl", a.operands[0].imm),
                            {reg_of(AsmOperand{AsmOperand::Kind::Reg,
                                               a.operands[0].base, 0, 0, "",
                                               "", 1, ""})},
                            reg_of(a.operands[1])}};
      },
      "lea base+disp"));

  rules.push_back(lift_rule(
      "mach/imul_one",
      [](const AsmInst& a) {
        return is_stem(a, "imul") && a.operands.size() == 1 &&
               is_data_reg(a.operands[0]);
      },
      [](const AsmInst& a) {
        return MachInst{
            Mop{OpCode::simple(sized_op("Omul", op_width(a))),
                {MachReg::AX, reg_of(a.operands[0])},
                MachReg::AX}};
      },
      "one-operand imul"));

  rules.push_back(lift_rule(
      "mach/call",
      [](const AsmInst& a) {
        return is_stem(a, "call") && a.operands.size() == 1 &&
               a.operands[0].kind == AsmOperand::Kind::Sym;
      },
      [](const AsmInst& a) { return MachInst{Mcall{a.operands[0].sym}}; },
      "direct call"));

  rules.push_back(lift_rule(
      "mach/ret",
      [](const AsmInst& a) { return is_stem(a, "ret"); },
      [](const AsmInst&) { return MachInst{Mreturn{}}; }, "ret"));

  // IDIV writes both quotient and remainder; the remainder statement sits at
  // the instruction node, the quotient on its synthetic companion.
  {
    RuleBuilder rb("mach/idiv_mod");
    auto n = rb.var("N"), a = rb.var("A"), s = rb.var("S");
    rb.match("instr", {n, a})
        .when(
            [a](const RuleEnv& e) {
              const auto& inst = env_asm(e, a);
              return is_stem(inst, "idiv") && inst.operands.size() == 1 &&
                     is_data_reg(inst.operands[0]);
            },
            "is idiv")
        .bind(s,
              [a](const RuleEnv& e) {
                const auto& inst = env_asm(e, a);
                return make_stmt(
                    IrLevel::Mach,
                    MachInst{Mop{
                        OpCode::simple(sized_op("Omod", op_width(inst))),
                        {MachReg::AX, reg_of(inst.operands[0])},
                        MachReg::DX}});
              },
              "remainder op")
        .derive("mach_inst", {n, s});
    rules.push_back(rb.build());
  }
  {
    RuleBuilder rb("mach/idiv_div");
    auto n = rb.var("N"), a = rb.var("A"), syn = rb.var("SYN"),
         s = rb.var("S");
    rb.match("instr", {n, a})
        .when(
            [a](const RuleEnv& e) {
              const auto& inst = env_asm(e, a);
              return is_stem(inst, "idiv") && inst.operands.size() == 1 &&
                     is_data_reg(inst.operands[0]);
            },
            "is idiv")
        .match("syn_node", {n, syn})
        .bind(s,
              [a](const RuleEnv& e) {
                const auto& inst = env_asm(e, a);
                return make_stmt(
                    IrLevel::Mach,
                    MachInst{Mop{
                        OpCode::simple(sized_op("Odiv", op_width(inst))),
                        {MachReg::AX, reg_of(inst.operands[0])},
                        MachReg::AX}});
              },
              "quotient op")
        .derive("mach_inst", {syn, s});
    rules.push_back(rb.build());
  }

  // Flag-definition reachability: the nearest flag writer feeding a jcc or
  // setcc, crossing only non-flag-writing instructions.
  {
    RuleBuilder rb("mach/flag_base");
    auto m = rb.var("M"), a = rb.var("A"), n = rb.var("N");
    rb.match("instr", {m, a})
        .when([a](const RuleEnv& e) { return writes_flags(env_asm(e, a)); },
              "writes flags")
        .match("instr_next", {m, n})
        .derive("asm_flag_reach", {m, n});
    rules.push_back(rb.build());
  }
  {
    RuleBuilder rb("mach/flag_step");
    auto m = rb.var("M"), k = rb.var("K"), b = rb.var("B"), n = rb.var("N");
    rb.match("asm_flag_reach", {m, k})
        .match("instr", {k, b})
        .when([b](const RuleEnv& e) { return !writes_flags(env_asm(e, b)); },
              "crosses non-writer")
        .match("instr_next", {k, n})
        .derive("asm_flag_reach", {m, n});
    rules.push_back(rb.build());
  }
  {
    RuleBuilder rb("mach/cond");
    auto n = rb.var("N"), j = rb.var("J"), m = rb.var("M"), c = rb.var("C"),
         ft = rb.var("FT"), s = rb.var("S");
    rb.match("instr", {n, j})
        .when(
            [j](const RuleEnv& e) {
              const auto& inst = env_asm(e, j);
              return is_jcc(stem_of(inst)) && inst.operands.size() == 1 &&
                     is_imm(inst.operands[0]);
            },
            "is jcc")
        .match("asm_flag_reach", {m, n})
        .match("instr", {m, c})
        .when(
            [c](const RuleEnv& e) {
              return flag_compare(env_asm(e, c)).ok;
            },
            "flag source decodes")
        .match("instr_next", {n, ft})
        .bind(s,
              [j, c, ft](const RuleEnv& e) {
                const auto& jcc = env_asm(e, j);
                auto fc = flag_compare(env_asm(e, c));
                Mcond mc;
                mc.cond = cc_condition(stem_of(jcc));
                mc.width = fc.width;
                mc.args = fc.args;
                mc.imm = fc.imm;
                mc.iftrue =
                    NodeId::addr(static_cast<uint64_t>(jcc.operands[0].imm));
                mc.iffalse = e[ft].as_node();
                return make_stmt(IrLevel::Mach, MachInst{mc});
              },
              "fused compare-and-branch")
        .derive("mach_inst", {n, s});
    rules.push_back(rb.build());
  }
  {
    RuleBuilder rb("mach/setcc");
    auto n = rb.var("N"), j = rb.var("J"), m = rb.var("M"), c = rb.var("C"),
         s = rb.var("S");
    rb.match("instr", {n, j})
        .when(
            [j](const RuleEnv& e) {
              const auto& inst = env_asm(e, j);
              return is_setcc(stem_of(inst)) && inst.operands.size() == 1 &&
                     is_data_reg(inst.operands[0]);
            },
            "is setcc")
        .match("asm_flag_reach", {m, n})
        .match("instr", {m, c})
        .when(
            [c](const RuleEnv& e) {
              return flag_compare(env_asm(e, c)).ok;
            },
            "flag source decodes")
        .bind(s,
              [j, c](const RuleEnv& e) {
                const auto& inst = env_asm(e, j);
                auto fc = flag_compare(env_asm(e, c));
                OpCode op =
                    OpCode::with_cond("Ocmpset", cc_condition(stem_of(inst)));
                op.imm = fc.imm;
                return make_stmt(
                    IrLevel::Mach,
                    MachInst{Mop{op, fc.args, reg_of(inst.operands[0])}});
              },
              "fused compare-and-set")
        .derive("mach_inst", {n, s});
    rules.push_back(rb.build());
  }

  return rules;
}

}  // namespace

Pass make_lift_mach() {
  return make_pass("lift_mach",
                   {"instr", "instr_next", "syn_node", "asm_flag_reach"},
                   {"mach_inst", "asm_flag_reach"}, lift_mach_rules());
}

Pass make_recognize_alloca() {
  std::vector<Rule> rules;
  auto is_dynamic_sub = [](const AsmInst& a) {
    return is_stem(a, "sub") && a.operands.size() == 2 &&
           is_data_reg(a.operands[0]) && is_reg(a.operands[1]) &&
           a.operands[1].reg == "rsp";
  };
  auto is_capture = [](const AsmInst& a) {
    return is_stem(a, "mov") && a.operands.size() == 2 &&
           is_reg(a.operands[0]) && a.operands[0].reg == "rsp" &&
           is_data_reg(a.operands[1]);
  };
  {
    RuleBuilder rb("alloca/builtin");
    auto n = rb.var("N"), a = rb.var("A"), m = rb.var("M"), b = rb.var("B"),
         s = rb.var("S");
    rb.match("instr", {n, a})
        .when([=](const RuleEnv& e) { return is_dynamic_sub(env_asm(e, a)); },
              "sub reg,%rsp")
        .match("instr_next", {n, m})
        .match("instr", {m, b})
        .when([=](const RuleEnv& e) { return is_capture(env_asm(e, b)); },
              "capture of %rsp")
        .bind(s,
              [a, b](const RuleEnv& e) {
                return make_stmt(
                    IrLevel::Mach,
                    MachInst{Mbuiltin{"alloca",
                                      {reg_of(env_asm(e, a).operands[0])},
                                      reg_of(env_asm(e, b).operands[1])}});
              },
              "alloca builtin")
        .derive("mach_inst", {n, s});
    rules.push_back(rb.build());
  }
  {
    RuleBuilder rb("alloca/capture_role");
    auto n = rb.var("N"), a = rb.var("A"), m = rb.var("M"), b = rb.var("B");
    rb.match("instr", {n, a})
        .when([=](const RuleEnv& e) { return is_dynamic_sub(env_asm(e, a)); },
              "sub reg,%rsp")
        .match("instr_next", {n, m})
        .match("instr", {m, b})
        .when([=](const RuleEnv& e) { return is_capture(env_asm(e, b)); },
              "capture of %rsp")
        .derive("node_role", {m, Value::atom("fused")});
    rules.push_back(rb.build());
  }
  return make_pass("recognize_alloca", {"instr", "instr_next"},
                   {"mach_inst", "node_role"}, std::move(rules));
}

// ---- mach_cover ----------------------------------------------------------------

Pass make_mach_cover() {
  return make_procedural_pass(
      "mach_cover", {"instr", "mach_inst", "node_role", "diag"}, {"diag"},
      [](PassContext& ctx) {
        auto& store = ctx.store;
        std::set<uint64_t> covered;
        for (const auto& [t, k] : store.relation("mach_inst").rows)
          covered.insert(t[0].as_node().value);
        for (const auto& [t, k] : store.relation("node_role").rows)
          covered.insert(t[0].as_node().value);
        for (const auto& [t, k] : store.relation("diag").rows)
          covered.insert(t[0].as_node().value);
        for (const auto& [t, k] : store.relation("instr").rows) {
          NodeId n = t[0].as_node();
          if (covered.count(n.value)) continue;
          const auto* a = as_asm(t[1]);
          ctx.derive("mach_cover", "diag",
                     {vnode(n), vatom("unsupported-pattern"),
                      vatom(a ? a->mnemonic : "?")},
                     {{"instr", t}});
        }
      });
}

// ---- mach_cfg ------------------------------------------------------------------

namespace {

void run_mach_cfg(PassContext& ctx) {
  auto& store = ctx.store;
  const std::string pass = "mach_cfg";

  std::map<uint64_t, std::string> role;
  for (const auto& [t, k] : store.relation("node_role").rows)
    role[t[0].as_node().value] = t[1].as_atom();
  std::map<uint64_t, uint64_t> next;
  for (const auto& [t, k] : store.relation("instr_next").rows)
    next[t[0].as_node().value] = t[1].as_node().value;
  std::map<uint64_t, uint64_t> syn_of;
  for (const auto& [t, k] : store.relation("syn_node").rows)
    syn_of[t[0].as_node().value] = t[1].as_node().value;

  auto has_stmt = [&](uint64_t n) {
    return !store.candidates(IrLevel::Mach, NodeId{n}).empty();
  };
  auto jmp_target = [&](uint64_t n) -> std::optional<uint64_t> {
    for (const auto& [s, k] : store.candidates(IrLevel::X86Asm, NodeId{n})) {
      const auto* a = as_asm(s);
      if (a && stem_of(*a) == "jmp" && !a->operands.empty() &&
          is_imm(a->operands[0]))
        return static_cast<uint64_t>(a->operands[0].imm);
    }
    return std::nullopt;
  };

  // First statement-bearing node reached from n, following fallthrough and
  // unconditional jumps across role-only nodes.
  std::function<std::optional<uint64_t>(uint64_t, std::set<uint64_t>&)>
      resolve = [&](uint64_t n,
                    std::set<uint64_t>& seen) -> std::optional<uint64_t> {
    if (!seen.insert(n).second) return std::nullopt;
    if (has_stmt(n)) return n;
    auto it = role.find(n);
    if (it != role.end() && it->second == "jump") {
      auto tgt = jmp_target(n);
      if (tgt) return resolve(*tgt, seen);
      return std::nullopt;
    }
    auto nx = next.find(n);
    if (nx == next.end()) return std::nullopt;
    return resolve(nx->second, seen);
  };
  auto resolve1 = [&](uint64_t n) {
    std::set<uint64_t> seen;
    return resolve(n, seen);
  };

  for (const auto& f : function_views(store)) {
    auto entry = resolve1(f.entry.value);
    if (entry)
      ctx.derive(pass, "func_entry", {vatom(f.name), vnode(NodeId{*entry})},
                 {{"func", {vatom(f.name), vnode(f.entry)}}});

    auto edge = [&](uint64_t from, uint64_t to, const char* kind,
                    NodeId src_instr) {
      ctx.derive(pass, "mach_succ",
                 {vnode(NodeId{from}), vnode(NodeId{to}), vatom(kind)},
                 {{"instr", instr_fact(store, src_instr)}});
    };

    for (const auto& [n, a] : f.lines) {
      if (!has_stmt(n.value)) continue;
      bool is_cond = false, is_ret = false, is_call = false;
      std::optional<std::pair<uint64_t, uint64_t>> cond_targets;
      for (const auto& [s, k] : store.candidates(IrLevel::Mach, n)) {
        const auto* mi = as_mach(s);
        if (!mi) continue;
        if (const auto* mc = std::get_if<Mcond>(mi)) {
          is_cond = true;
          cond_targets = {mc->iftrue.value, mc->iffalse.value};
        } else if (std::get_if<Mreturn>(mi)) {
          is_ret = true;
        } else if (std::get_if<Mcall>(mi)) {
          is_call = true;
        }
      }
      if (is_cond && cond_targets) {
        for (bool tr : {true, false}) {
          uint64_t raw = tr ? cond_targets->first : cond_targets->second;
          auto dst = resolve1(raw);
          if (dst) {
            edge(n.value, *dst, tr ? "branch-true" : "branch-false", n);
          } else {
            NodeId unknown = store.alloc_synthetic();
            ctx.derive(pass, "diag",
                       {vnode(n), vatom("dangling-branch"),
                        vatom("branch target outside the function")},
                       {{"instr", instr_fact(store, n)}});
            edge(n.value, unknown.value, tr ? "branch-true" : "branch-false",
                 n);
          }
        }
        continue;
      }
      if (is_ret) {
        ctx.derive(pass, "func_exit", {vatom(f.name), vnode(n)},
                   {{"instr", instr_fact(store, n)}});
        continue;
      }
      auto syn = syn_of.find(n.value);
      if (syn != syn_of.end()) {
        edge(n.value, syn->second, "fallthrough", n);
        auto nx = next.find(n.value);
        if (nx != next.end()) {
          auto dst = resolve1(nx->second);
          if (dst) edge(syn->second, *dst, "fallthrough", n);
        }
        continue;
      }
      auto nx = next.find(n.value);
      if (nx == next.end()) continue;
      auto dst = resolve1(nx->second);
      if (dst) edge(n.value, *dst, is_call ? "call-return" : "fallthrough", n);
    }
  }
}

}  // namespace

Pass make_mach_cfg() {
  return make_procedural_pass(
      "mach_cfg",
      {"instr", "instr_next", "func", "func_instr", "node_role", "syn_node",
       "mach_inst"},
      {"mach_succ", "func_entry", "func_exit", "diag"}, run_mach_cfg);
}

}  // namespace reclift
