#include <sstream>

#include "pass_util.hpp"

// Type inference, struct recovery, and signature reconciliation, plus the
// signature seed loader.

namespace reclift {

using namespace detail;

Value pseudo_subject(const std::string& func, Pseudo p) {
  return Value::tuple({Value::atom("p"), Value::atom(func),
                       Value::integer(static_cast<int64_t>(p))});
}

Value slot_subject(const std::string& func, int64_t ofs) {
  return Value::tuple(
      {Value::atom("s"), Value::atom(func), Value::integer(ofs)});
}

TypeRef chunk_ctype(CTypeTable& types, Chunk c) {
  switch (c) {
    case Chunk::MInt8s:
      return types.int_type(8, true);
    case Chunk::MInt8u:
      return types.int_type(8, false);
    case Chunk::MInt16s:
      return types.int_type(16, true);
    case Chunk::MInt16u:
      return types.int_type(16, false);
    case Chunk::MInt32:
      return types.int_type(32, true);
    case Chunk::MInt64:
      return types.long_type(true);
    case Chunk::MFloat32:
      return types.float_type(32);
    case Chunk::MFloat64:
      return types.float_type(64);
    case Chunk::Many64:
      return types.any64();
  }
  return types.any64();
}

namespace {

const RtlInst& env_rtl(const RuleEnv& env, Var v) {
  const RtlInst* r = as_rtl(env[v]);
  if (!r) throw EngineError("expected an RTL statement");
  return *r;
}

bool op_is_64(const std::string& name) {
  return name.size() > 1 && name.back() == 'l' && name != "Ocastsl" &&
         name.rfind("Ocast", 0) != 0;
}

bool arith_op(const std::string& name) {
  static const std::set<std::string> ops = {
      "Oadd", "Osub", "Omul", "Odiv", "Omod", "Oand", "Oor",  "Oxor",
      "Oshl", "Oshr", "Osar", "Oaddl", "Osubl", "Omull", "Odivl",
      "Omodl", "Oandl", "Oorl", "Oxorl", "Oshll", "Oshrl", "Osarl",
      "Onot", "Oneg", "Onotl", "Onegl"};
  return ops.count(name) > 0;
}

std::vector<Rule> infer_rules(CTypeTable& types) {
  std::vector<Rule> rules;
  auto* tt = &types;

  // Loaded values take the chunk's type.
  {
    RuleBuilder rb("types/load_dst");
    auto n = rb.var("N"), s = rb.var("S"), f = rb.var("F"),
         subj = rb.var("SUBJ"), ty = rb.var("TY");
    rb.match("rtl_opt", {n, s})
        .when([s](const RuleEnv& e) {
          return std::holds_alternative<Iload>(env_rtl(e, s));
        }, "is load")
        .match("func_instr", {f, n})
        .bind(subj,
              [s, f](const RuleEnv& e) {
                return pseudo_subject(e[f].as_atom(),
                                      std::get<Iload>(env_rtl(e, s)).dst);
              },
              "loaded pseudo")
        .bind(ty,
              [s, tt](const RuleEnv& e) {
                return Value::type(
                    chunk_ctype(*tt, std::get<Iload>(env_rtl(e, s)).chunk));
              },
              "chunk type")
        .derive("type_evidence", {subj, ty, Value::atom("opcode")});
    rules.push_back(rb.build());
  }

  // Dereference facts from loads and stores over a pseudo base.
  for (bool load : {true, false}) {
    RuleBuilder rb(load ? "types/deref_load" : "types/deref_store");
    auto n = rb.var("N"), s = rb.var("S"), f = rb.var("F"),
         subj = rb.var("SUBJ"), ofs = rb.var("OFS"), ck = rb.var("CK");
    rb.match("rtl_opt", {n, s})
        .when(
            [s, load](const RuleEnv& e) {
              const auto& inst = env_rtl(e, s);
              const Addressing* addr = nullptr;
              const std::vector<Pseudo>* args = nullptr;
              if (load) {
                const auto* ld = std::get_if<Iload>(&inst);
                if (!ld) return false;
                addr = &ld->addr;
                args = &ld->args;
              } else {
                const auto* st = std::get_if<Istore>(&inst);
                if (!st) return false;
                addr = &st->addr;
                args = &st->args;
              }
              return addr->kind == Addressing::Kind::Indexed &&
                     args->size() == 1;
            },
            "base+displacement access")
        .match("func_instr", {f, n})
        .bind(subj,
              [s, f, load](const RuleEnv& e) {
                const auto& inst = env_rtl(e, s);
                Pseudo base = load ? std::get<Iload>(inst).args[0]
                                   : std::get<Istore>(inst).args[0];
                return pseudo_subject(e[f].as_atom(), base);
              },
              "base pseudo")
        .bind(ofs,
              [s, load](const RuleEnv& e) {
                const auto& inst = env_rtl(e, s);
                return Value::integer(load ? std::get<Iload>(inst).addr.disp
                                           : std::get<Istore>(inst).addr.disp);
              },
              "displacement")
        .bind(ck,
              [s, load](const RuleEnv& e) {
                const auto& inst = env_rtl(e, s);
                return Value::chunk(load ? std::get<Iload>(inst).chunk
                                         : std::get<Istore>(inst).chunk);
              },
              "access chunk")
        .derive("deref", {f, subj, ofs, ck, n});
    rules.push_back(rb.build());
  }

  // A base dereferenced at offset zero is a pointer to the loaded type.
  {
    RuleBuilder rb("types/ptr_base");
    auto f = rb.var("F"), subj = rb.var("SUBJ"), ck = rb.var("CK"),
         n = rb.var("N"), ty = rb.var("TY");
    rb.match("deref", {f, subj, Value::integer(0), ck, n})
        .bind(ty,
              [ck, tt](const RuleEnv& e) {
                return Value::type(
                    tt->pointer_to(chunk_ctype(*tt, e[ck].as_chunk())));
              },
              "pointer to chunk type")
        .derive("type_evidence", {subj, ty, Value::atom("pointer-deref")});
    rules.push_back(rb.build());
  }

  // Operation widths: 64-bit arithmetic marks operands long, 32-bit marks
  // them int (signedness refined elsewhere).
  for (int argpos : {-1, 0, 1}) {
    RuleBuilder rb("types/op_width_" +
                   (argpos < 0 ? std::string("dst")
                               : "arg" + std::to_string(argpos)));
    auto n = rb.var("N"), s = rb.var("S"), f = rb.var("F"),
         subj = rb.var("SUBJ"), ty = rb.var("TY");
    rb.match("rtl_opt", {n, s})
        .when(
            [s, argpos](const RuleEnv& e) {
              const auto* op = std::get_if<Iop>(&env_rtl(e, s));
              if (!op || !arith_op(op->op.name)) return false;
              if (argpos >= 0 &&
                  static_cast<size_t>(argpos) >= op->args.size())
                return false;
              return true;
            },
            "arithmetic op")
        .match("func_instr", {f, n})
        .bind(subj,
              [s, f, argpos](const RuleEnv& e) {
                const auto& op = std::get<Iop>(env_rtl(e, s));
                Pseudo p = argpos < 0
                               ? op.dst
                               : op.args[static_cast<size_t>(argpos)];
                return pseudo_subject(e[f].as_atom(), p);
              },
              "operand pseudo")
        .bind(ty,
              [s, tt](const RuleEnv& e) {
                const auto& op = std::get<Iop>(env_rtl(e, s));
                return Value::type(op_is_64(op.op.name)
                                       ? tt->long_type(true)
                                       : tt->int_type(32, true));
              },
              "width type")
        .derive("type_evidence", {subj, ty, Value::atom("opcode")});
    rules.push_back(rb.build());
  }

  // Signed and unsigned comparisons witness the operand's signedness.
  for (int argpos : {0, 1}) {
    RuleBuilder rb("types/branch_sign_arg" + std::to_string(argpos));
    auto n = rb.var("N"), s = rb.var("S"), f = rb.var("F"),
         subj = rb.var("SUBJ"), ty = rb.var("TY");
    rb.match("rtl_opt", {n, s})
        .when(
            [s, argpos](const RuleEnv& e) {
              const auto* c = std::get_if<Icond>(&env_rtl(e, s));
              if (!c) return false;
              if (c->cond == Cond::Ceq || c->cond == Cond::Cne) return false;
              return static_cast<size_t>(argpos) < c->args.size();
            },
            "ordering comparison")
        .match("func_instr", {f, n})
        .bind(subj,
              [s, f, argpos](const RuleEnv& e) {
                const auto& c = std::get<Icond>(env_rtl(e, s));
                return pseudo_subject(e[f].as_atom(),
                                      c.args[static_cast<size_t>(argpos)]);
              },
              "compared pseudo")
        .bind(ty,
              [s, tt](const RuleEnv& e) {
                const auto& c = std::get<Icond>(env_rtl(e, s));
                bool sgn = cond_is_signed_order(c.cond);
                return Value::type(c.width == 64 ? tt->long_type(sgn)
                                                 : tt->int_type(32, sgn));
              },
              "signedness-typed width")
        .derive("type_evidence", {subj, ty, Value::atom("branch-signedness")});
    rules.push_back(rb.build());
  }

  // Calls to seeded functions type their arguments and result.
  for (int argpos = 0; argpos < 6; ++argpos) {
    RuleBuilder rb("types/seed_arg" + std::to_string(argpos));
    auto n = rb.var("N"), s = rb.var("S"), f = rb.var("F"), tgt = rb.var("TGT"),
         params = rb.var("PARAMS"), ret = rb.var("RET"), va = rb.var("VA"),
         subj = rb.var("SUBJ"), ty = rb.var("TY");
    rb.match("rtl_opt", {n, s})
        .when(
            [s, argpos](const RuleEnv& e) {
              const auto* c = std::get_if<Icall>(&env_rtl(e, s));
              return c && static_cast<size_t>(argpos) < c->args.size();
            },
            "call with enough arguments")
        .bind(tgt,
              [s](const RuleEnv& e) {
                return Value::atom(std::get<Icall>(env_rtl(e, s)).target);
              },
              "call target")
        .match("seed_sig", {tgt, params, ret, va})
        .when(
            [params, argpos](const RuleEnv& e) {
              return static_cast<size_t>(argpos) <
                     e[params].as_tuple().size();
            },
            "parameter exists")
        .match("func_instr", {f, n})
        .bind(subj,
              [s, f, argpos](const RuleEnv& e) {
                const auto& c = std::get<Icall>(env_rtl(e, s));
                return pseudo_subject(e[f].as_atom(),
                                      c.args[static_cast<size_t>(argpos)]);
              },
              "argument pseudo")
        .bind(ty,
              [params, argpos](const RuleEnv& e) {
                return e[params].as_tuple()[static_cast<size_t>(argpos)];
              },
              "seeded parameter type")
        .derive("type_evidence", {subj, ty, Value::atom("signature-seed")});
    rules.push_back(rb.build());
  }
  {
    RuleBuilder rb("types/seed_ret");
    auto n = rb.var("N"), s = rb.var("S"), f = rb.var("F"), tgt = rb.var("TGT"),
         params = rb.var("PARAMS"), ret = rb.var("RET"), va = rb.var("VA"),
         subj = rb.var("SUBJ");
    rb.match("rtl_opt", {n, s})
        .when(
            [s](const RuleEnv& e) {
              const auto* c = std::get_if<Icall>(&env_rtl(e, s));
              return c && c->dst.has_value();
            },
            "call with result")
        .bind(tgt,
              [s](const RuleEnv& e) {
                return Value::atom(std::get<Icall>(env_rtl(e, s)).target);
              },
              "call target")
        .match("seed_sig", {tgt, params, ret, va})
        .match("func_instr", {f, n})
        .bind(subj,
              [s, f](const RuleEnv& e) {
                return pseudo_subject(e[f].as_atom(),
                                      *std::get<Icall>(env_rtl(e, s)).dst);
              },
              "result pseudo")
        .derive("type_evidence", {subj, ret, Value::atom("signature-seed")});
    rules.push_back(rb.build());
  }

  // Evidence flows across surviving moves, both directions.
  for (bool fwd : {true, false}) {
    RuleBuilder rb(fwd ? "types/prop_fwd" : "types/prop_bwd");
    auto n = rb.var("N"), s = rb.var("S"), f = rb.var("F"), from = rb.var("A"),
         to = rb.var("B"), ty = rb.var("TY"), src = rb.var("SRC");
    rb.match("rtl_opt", {n, s})
        .when(
            [s](const RuleEnv& e) {
              const auto* op = std::get_if<Iop>(&env_rtl(e, s));
              return op && op->op.name == "Omove" && op->args.size() == 1;
            },
            "move")
        .match("func_instr", {f, n})
        .bind(from,
              [s, f, fwd](const RuleEnv& e) {
                const auto& op = std::get<Iop>(env_rtl(e, s));
                return pseudo_subject(e[f].as_atom(),
                                      fwd ? op.args[0] : op.dst);
              },
              "source subject")
        .match("type_evidence", {from, ty, src})
        .bind(to,
              [s, f, fwd](const RuleEnv& e) {
                const auto& op = std::get<Iop>(env_rtl(e, s));
                return pseudo_subject(e[f].as_atom(),
                                      fwd ? op.dst : op.args[0]);
              },
              "target subject")
        .derive("type_evidence", {to, ty, Value::atom("propagation")});
    rules.push_back(rb.build());
  }

  // Evidence follows live-range merges recorded as aliases.
  for (bool fwd : {true, false}) {
    RuleBuilder rb(fwd ? "types/alias_fwd" : "types/alias_bwd");
    auto f = rb.var("F"), old_p = rb.var("OLD"), canon = rb.var("CANON"),
         from = rb.var("FROM"), to = rb.var("TO"), ty = rb.var("TY"),
         src = rb.var("SRC");
    rb.match("pseudo_alias", {f, old_p, canon})
        .bind(from,
              [f, old_p, canon, fwd](const RuleEnv& e) {
                return pseudo_subject(
                    e[f].as_atom(),
                    static_cast<Pseudo>(fwd ? e[old_p].as_int()
                                            : e[canon].as_int()));
              },
              "merged pseudo")
        .match("type_evidence", {from, ty, src})
        .bind(to,
              [f, old_p, canon, fwd](const RuleEnv& e) {
                return pseudo_subject(
                    e[f].as_atom(),
                    static_cast<Pseudo>(fwd ? e[canon].as_int()
                                            : e[old_p].as_int()));
              },
              "canonical pseudo")
        .derive("type_evidence", {to, ty, Value::atom("propagation")});
    rules.push_back(rb.build());
  }

  return rules;
}

}  // namespace

Pass make_infer_types(CTypeTable& types) {
  return make_pass("infer_types",
                   {"rtl_opt", "func_instr", "seed_sig", "deref",
                    "type_evidence", "pseudo_alias"},
                   {"type_evidence", "deref"}, infer_rules(types));
}

// ---- struct recovery ---------------------------------------------------------------

namespace {

void run_structs(PassContext& ctx) {
  auto& store = ctx.store;
  auto& types = ctx.types;
  const std::string pass = "recover_structs";

  struct VLess {
    bool operator()(const Value& a, const Value& b) const { return a < b; }
  };
  std::map<Value, std::map<int64_t, std::pair<Chunk, Tuple>>, VLess> groups;
  for (const auto& [t, k] : store.relation("deref").rows) {
    const Value& subj = t[1];
    int64_t ofs = t[2].as_int();
    Chunk c = t[3].as_chunk();
    auto& slot = groups[subj];
    auto it = slot.find(ofs);
    if (it == slot.end()) {
      slot.emplace(ofs, std::make_pair(c, t));
    } else if (it->second.first != c) {
      ctx.derive(pass, "diag",
                 {t[4], Value::atom("conflicting-deref"),
                  Value::atom("offset " + std::to_string(ofs) +
                              " accessed with two widths")},
                 {{"deref", t}});
    }
  }

  for (const auto& [subj, offsets] : groups) {
    if (offsets.size() < 2) continue;  // degenerate layouts are discarded
    bool uniform = true;
    Chunk first = offsets.begin()->second.first;
    for (const auto& [ofs, ck] : offsets)
      if (ck.first != first) uniform = false;
    bool regular = true;
    int stride = chunk_size(first);
    for (const auto& [ofs, ck] : offsets)
      if (ofs % stride != 0) regular = false;

    std::vector<std::pair<std::string, Tuple>> because;
    for (const auto& [ofs, ck] : offsets)
      because.push_back({"deref", ck.second});

    if (uniform && regular) {
      // Array reading: pointer to the uniform element type.
      TypeRef elem = chunk_ctype(types, first);
      ctx.derive(pass, "type_evidence",
                 {subj, Value::type(types.pointer_to(elem)),
                  Value::atom("pointer-deref")},
                 because);
      continue;
    }
    std::vector<std::pair<int64_t, TypeRef>> fields;
    for (const auto& [ofs, ck] : offsets)
      fields.emplace_back(ofs, chunk_ctype(types, ck.first));
    TypeRef layout = types.struct_of(std::move(fields));
    ctx.derive(pass, "struct_hyp", {subj, Value::type(layout)}, because);
    ctx.derive(pass, "type_evidence",
               {subj, Value::type(types.pointer_to(layout)),
                Value::atom("pointer-deref")},
               because);
  }
}

}  // namespace

Pass make_recover_structs(CTypeTable&) {
  return make_procedural_pass("recover_structs", {"deref", "type_evidence"},
                              {"struct_hyp", "type_evidence", "diag"},
                              run_structs);
}

// ---- signature reconciliation --------------------------------------------------------

namespace {

int type_rank(const TypeRef& t) {
  switch (t->kind) {
    case TypeDesc::Kind::Pointer:
      return t->pointee->kind == TypeDesc::Kind::Struct ? 90 : 80;
    case TypeDesc::Kind::Float:
      return t->width == 64 ? 70 : 65;
    case TypeDesc::Kind::Long:
      return 60;
    case TypeDesc::Kind::Int:
      return t->width == 32 ? 50 : 30;
    case TypeDesc::Kind::Any64:
      return 10;
    default:
      return 0;
  }
}

void run_reconcile(PassContext& ctx) {
  auto& store = ctx.store;
  auto& types = ctx.types;
  const std::string pass = "reconcile_signatures";

  // Evidence lookup per subject.
  std::map<std::string, std::vector<TypeRef>> evidence;
  for (const auto& [t, k] : store.relation("type_evidence").rows)
    evidence[render_value(t[0])].push_back(t[1].as_type());
  auto pick_type = [&](const std::string& func, Pseudo p,
                       TypeRef fallback) -> TypeRef {
    auto it = evidence.find(render_value(pseudo_subject(func, p)));
    if (it == evidence.end() || it->second.empty()) return fallback;
    TypeRef best = it->second.front();
    for (const auto& t : it->second) {
      if (type_rank(t) > type_rank(best) ||
          (type_rank(t) == type_rank(best) && t->text < best->text))
        best = t;
    }
    return best;
  };

  std::map<std::string, int64_t> frame_ok;
  for (const auto& [t, k] : store.relation("frame_info").rows)
    frame_ok[t[0].as_atom()] = t[2].as_int();
  std::set<std::string> defined;
  for (const auto& [t, k] : store.relation("func").rows)
    defined.insert(t[0].as_atom());

  // Call sites: target -> (caller, node, args).
  struct CallSite {
    std::string caller;
    NodeId node;
    std::vector<Pseudo> args;
    Tuple fact;
  };
  std::map<std::string, std::vector<CallSite>> calls;
  std::map<std::string, std::string> func_of_node;
  for (const auto& [t, k] : store.relation("func_instr").rows)
    func_of_node[render_value(t[1])] = t[0].as_atom();
  for (const auto& [t, k] : store.relation("rtl_opt").rows) {
    const auto* c = std::get_if<Icall>(as_rtl(t[1]));
    if (!c) continue;
    auto fit = func_of_node.find(render_value(t[0]));
    if (fit == func_of_node.end()) continue;
    calls[c->target].push_back({fit->second, t[0].as_node(), c->args, t});
  }

  // Seeds.
  std::map<std::string, Tuple> seeds;
  for (const auto& [t, k] : store.relation("seed_sig").rows)
    seeds[t[0].as_atom()] = t;

  std::set<std::string> targets = defined;
  for (const auto& [tgt, sites] : calls) targets.insert(tgt);

  for (const auto& fname : targets) {
    std::vector<std::pair<std::string, Tuple>> because;
    // Precedence: external seed > definition site > call site.
    if (seeds.count(fname)) {
      const Tuple& s = seeds.at(fname);
      ctx.derive(pass, "signature",
                 {Value::atom(fname), s[1], s[2], s[3],
                  Value::atom("external-seed")},
                 {{"seed_sig", s}});
      continue;
    }
    if (defined.count(fname) && frame_ok.count(fname) &&
        frame_ok[fname] == 1) {
      std::map<int64_t, Pseudo> params;
      for (const auto& [t, k] : store.relation("param_reg").rows)
        if (t[0].as_atom() == fname) {
          params[t[1].as_int()] = static_cast<Pseudo>(t[2].as_int());
          because.push_back({"param_reg", t});
        }
      std::vector<Value> ptypes;
      for (const auto& [idx, p] : params)
        ptypes.push_back(
            Value::type(pick_type(fname, p, types.int_type(32, true))));
      // Arity cross-check against call sites.
      for (const auto& site : calls[fname]) {
        if (site.args.size() != ptypes.size()) {
          ctx.derive(pass, "diag",
                     {Value::node(site.node), Value::atom("arity-conflict"),
                      Value::atom("call passes " +
                                  std::to_string(site.args.size()) +
                                  " arguments, definition takes " +
                                  std::to_string(ptypes.size()))},
                     {{"rtl_opt", site.fact}});
        }
      }
      TypeRef ret = types.void_type();
      for (const auto& [t, k] : store.relation("ret_pseudo").rows)
        if (t[0].as_atom() == fname) {
          ret = pick_type(fname, static_cast<Pseudo>(t[1].as_int()),
                          types.int_type(32, true));
          because.push_back({"ret_pseudo", t});
          break;
        }
      Tuple func_row;
      for (const auto& [t, k] : store.relation("func").rows)
        if (t[0].as_atom() == fname) func_row = t;
      if (!func_row.empty()) because.push_back({"func", func_row});
      ctx.derive(pass, "signature",
                 {Value::atom(fname), Value::tuple(std::move(ptypes)),
                  Value::type(ret), Value::integer(0),
                  Value::atom("definition-site")},
                 because);
      continue;
    }
    // Call-site only: an undeclared external.
    if (calls[fname].empty()) continue;
    size_t arity = 0;
    for (const auto& site : calls[fname])
      arity = std::max(arity, site.args.size());
    std::vector<Value> ptypes;
    const auto& first_site = calls[fname].front();
    for (size_t i = 0; i < arity; ++i) {
      TypeRef t = types.long_type(true);
      if (i < first_site.args.size())
        t = pick_type(first_site.caller, first_site.args[i],
                      types.long_type(true));
      ptypes.push_back(Value::type(t));
    }
    because.push_back({"rtl_opt", first_site.fact});
    ctx.derive(pass, "signature",
               {Value::atom(fname), Value::tuple(std::move(ptypes)),
                Value::type(types.long_type(true)), Value::integer(0),
                Value::atom("call-site")},
               because);
  }

  // Globals referenced by symbol get a declared type from their access
  // chunk.
  for (const auto& [t, k] : store.relation("rtl_opt").rows) {
    const auto* inst = as_rtl(t[1]);
    const Addressing* addr = nullptr;
    Chunk ck = Chunk::MInt64;
    if (const auto* ld = std::get_if<Iload>(inst)) {
      addr = &ld->addr;
      ck = ld->chunk;
    } else if (const auto* st = std::get_if<Istore>(inst)) {
      addr = &st->addr;
      ck = st->chunk;
    }
    if (!addr || addr->kind != Addressing::Kind::Global) continue;
    ctx.derive(pass, "global_sym",
               {Value::atom(addr->symbol),
                Value::type(chunk_ctype(types, ck))},
               {{"rtl_opt", t}});
  }
}

}  // namespace

Pass make_reconcile_signatures(CTypeTable&) {
  return make_procedural_pass(
      "reconcile_signatures",
      {"type_evidence", "param_reg", "ret_pseudo", "rtl_opt", "seed_sig",
       "func", "func_instr", "frame_info", "struct_hyp", "pseudo_map"},
      {"signature", "global_sym", "diag"}, run_reconcile);
}

// ---- signature seeds -------------------------------------------------------------

namespace {

TypeRef parse_c_type(const std::string& spec, CTypeTable& types) {
  std::string s;
  for (char c : spec)
    if (c != ' ') s += c;
  int stars = 0;
  while (!s.empty() && s.back() == '*') {
    s.pop_back();
    stars++;
  }
  TypeRef base;
  if (s == "void")
    base = types.void_type();
  else if (s == "char" || s == "signedchar")
    base = types.int_type(8, true);
  else if (s == "unsignedchar")
    base = types.int_type(8, false);
  else if (s == "short")
    base = types.int_type(16, true);
  else if (s == "unsignedshort")
    base = types.int_type(16, false);
  else if (s == "int")
    base = types.int_type(32, true);
  else if (s == "unsigned" || s == "unsignedint")
    base = types.int_type(32, false);
  else if (s == "long" || s == "longlong" || s == "ssize_t" || s == "intptr_t")
    base = types.long_type(true);
  else if (s == "unsignedlong" || s == "unsignedlonglong" || s == "size_t" ||
           s == "uintptr_t")
    base = types.long_type(false);
  else if (s == "float")
    base = types.float_type(32);
  else if (s == "double")
    base = types.float_type(64);
  else
    throw ParseError("unknown C type in seed file: " + spec);
  for (int i = 0; i < stars; ++i) base = types.pointer_to(base);
  return base;
}

}  // namespace

void load_signature_seeds(const std::string& text, Store& store,
                          CTypeTable& types) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto nonws = line.find_first_not_of(" \t\r");
    if (nonws == std::string::npos) continue;
    auto colon = line.find(':');
    auto open = line.find('(', colon);
    auto close = line.find(')', open);
    auto arrow = line.find("->", close);
    if (colon == std::string::npos || open == std::string::npos ||
        close == std::string::npos || arrow == std::string::npos)
      throw ParseError("seed line " + std::to_string(line_no) +
                       ": expected name: (types) -> type");
    auto trim = [](std::string s) {
      size_t a = s.find_first_not_of(" \t\r");
      size_t b = s.find_last_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      return s.substr(a, b - a + 1);
    };
    std::string name = trim(line.substr(nonws, colon - nonws));
    std::string params = line.substr(open + 1, close - open - 1);
    std::string ret = trim(line.substr(arrow + 2));

    std::vector<Value> ptypes;
    bool variadic = false;
    size_t start = 0;
    while (start <= params.size()) {
      auto comma = params.find(',', start);
      std::string one = trim(params.substr(
          start, comma == std::string::npos ? std::string::npos
                                            : comma - start));
      if (!one.empty()) {
        if (one == "...")
          variadic = true;
        else if (one != "void")
          ptypes.push_back(Value::type(parse_c_type(one, types)));
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    store.insert_extensional(
        "seed_sig",
        {Value::atom(name), Value::tuple(std::move(ptypes)),
         Value::type(parse_c_type(ret, types)),
         Value::integer(variadic ? 1 : 0)},
        "seed: " + trim(line.substr(nonws)));
  }
}

const std::string& builtin_signature_seeds() {
  static const std::string seeds = R"(# libc signature seeds
strlen: (char*) -> unsigned long
strcmp: (char*, char*) -> int
strncmp: (char*, char*, unsigned long) -> int
strcpy: (char*, char*) -> char*
strncpy: (char*, char*, unsigned long) -> char*
strcat: (char*, char*) -> char*
strchr: (char*, int) -> char*
memcpy: (void*, void*, unsigned long) -> void*
memmove: (void*, void*, unsigned long) -> void*
memset: (void*, int, unsigned long) -> void*
memcmp: (void*, void*, unsigned long) -> int
malloc: (unsigned long) -> void*
calloc: (unsigned long, unsigned long) -> void*
realloc: (void*, unsigned long) -> void*
free: (void*) -> void
alloca: (unsigned long) -> void*
abs: (int) -> int
labs: (long) -> long
atoi: (char*) -> int
atol: (char*) -> long
exit: (int) -> void
abort: () -> void
puts: (char*) -> int
putchar: (int) -> int
getchar: () -> int
printf: (char*, ...) -> int
fprintf: (void*, char*, ...) -> int
sprintf: (char*, char*, ...) -> int
snprintf: (char*, unsigned long, char*, ...) -> int
qsort: (void*, unsigned long, unsigned long, void*) -> void
bsearch: (void*, void*, unsigned long, unsigned long, void*) -> void*
isdigit: (int) -> int
isalpha: (int) -> int
toupper: (int) -> int
tolower: (int) -> int
)";
  return seeds;
}

}  // namespace reclift
