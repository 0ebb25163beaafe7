#include <functional>

#include "pass_util.hpp"

// Csharpminor -> Clight: for each statement and each consistent combination
// of variable type candidates, one fully typed candidate. Loads through a
// struct-typed base at a known offset become member accesses.

namespace reclift {

using namespace detail;

namespace {

struct TypedBuild {
  CTypeTable& types;
  const std::map<Pseudo, TypeRef>& var_ty;

  TypeRef type_of_var(Pseudo p) const {
    auto it = var_ty.find(p);
    return it != var_ty.end() ? it->second : types.int_type(32, true);
  }

  // Struct field lookup for a pointer type at a byte offset.
  std::optional<StructField> field_at(const TypeRef& ptr, int64_t ofs) const {
    if (!ptr || ptr->kind != TypeDesc::Kind::Pointer) return std::nullopt;
    const TypeRef& pointee = ptr->pointee;
    if (pointee->kind != TypeDesc::Kind::Struct) return std::nullopt;
    for (const auto& fld : pointee->fields)
      if (fld.offset == ofs) return fld;
    return std::nullopt;
  }

  ExprPtr typed(const ExprPtr& e) const {
    if (!e) return nullptr;
    switch (e->kind) {
      case Expr::Kind::Const:
        return Expr::constant(e->value, types.int_type(32, true));
      case Expr::Kind::Var:
        return Expr::variable(e->var, type_of_var(e->var));
      case Expr::Kind::Sym: {
        return Expr::symbol(e->sym, types.pointer_to(types.any64()));
      }
      case Expr::Kind::Unop: {
        ExprPtr a = typed(e->a);
        return Expr::unop(e->op, a, a->ty);
      }
      case Expr::Kind::Binop: {
        ExprPtr a = typed(e->a);
        ExprPtr b = typed(e->b);
        TypeRef ty;
        if (e->op.cond) {
          ty = types.int_type(32, true);  // comparison result
        } else if (a->ty && a->ty->kind == TypeDesc::Kind::Pointer) {
          ty = a->ty;  // pointer arithmetic stays a pointer
        } else {
          ty = a->ty;
        }
        // Constants adopt the sibling type, except next to pointers where
        // the offset stays integral.
        auto sib = [&](const TypeRef& t) {
          return t && t->kind == TypeDesc::Kind::Pointer
                     ? types.long_type(true)
                     : t;
        };
        if (a->kind == Expr::Kind::Const && b->ty)
          a = Expr::constant(a->value, sib(b->ty));
        if (b->kind == Expr::Kind::Const && a->ty)
          b = Expr::constant(b->value, sib(a->ty));
        if (!e->op.cond) ty = a->ty;
        return Expr::binop(e->op, a, b, ty);
      }
      case Expr::Kind::Load: {
        TypeRef value_ty = chunk_ctype(types, e->chunk);
        // Recognize base-plus-constant loads over struct pointers.
        ExprPtr base;
        int64_t ofs = 0;
        if (e->a && e->a->kind == Expr::Kind::Var) {
          base = e->a;
          ofs = 0;
        } else if (e->a && e->a->kind == Expr::Kind::Binop &&
                   !e->a->op.cond && e->a->op.name == "Oaddl" && e->a->a &&
                   e->a->a->kind == Expr::Kind::Var && e->a->b &&
                   e->a->b->kind == Expr::Kind::Const) {
          base = e->a->a;
          ofs = e->a->b->value;
        }
        if (base) {
          TypeRef bty = type_of_var(base->var);
          if (auto fld = field_at(bty, ofs)) {
            return Expr::member(Expr::variable(base->var, bty), fld->name,
                                fld->type);
          }
        }
        return Expr::load(e->chunk, typed(e->a), value_ty);
      }
      case Expr::Kind::Field: {
        ExprPtr a = typed(e->a);
        if (auto fld = field_at(a->ty, 0)) {
          (void)fld;
        }
        return Expr::member(a, e->field, e->ty ? e->ty : types.any64());
      }
    }
    return e;
  }

  Stmt typed_stmt(const Stmt& s, const TypeRef& call_ret) const {
    Stmt out = s;
    std::visit(
        [&](auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Sset>) {
            n.e = typed(n.e);
            n.dst_ty = type_of_var(n.dst);
          } else if constexpr (std::is_same_v<T, Sstore>) {
            n.addr = typed(n.addr);
            n.val = typed(n.val);
          } else if constexpr (std::is_same_v<T, Scall>) {
            for (auto& a : n.args) a = typed(a);
            if (n.dst) n.dst_ty = call_ret ? call_ret : type_of_var(*n.dst);
          } else if constexpr (std::is_same_v<T, Sifthenelse>) {
            n.cond = typed(n.cond);
          } else if constexpr (std::is_same_v<T, Sreturn>) {
            if (n.e) n.e = typed(n.e);
          }
        },
        out);
    return out;
  }
};

void collect_stmt_vars(const Stmt& s, std::vector<Pseudo>& vars) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Sset>) {
          vars.push_back(n.dst);
          collect_vars(n.e, vars);
        } else if constexpr (std::is_same_v<T, Sstore>) {
          collect_vars(n.addr, vars);
          collect_vars(n.val, vars);
        } else if constexpr (std::is_same_v<T, Scall>) {
          if (n.dst) vars.push_back(*n.dst);
          for (const auto& a : n.args) collect_vars(a, vars);
        } else if constexpr (std::is_same_v<T, Sifthenelse>) {
          collect_vars(n.cond, vars);
        } else if constexpr (std::is_same_v<T, Sreturn>) {
          collect_vars(n.e, vars);
        }
      },
      s);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
}

void run_emit_clight(PassContext& ctx, size_t candidate_cap) {
  auto& store = ctx.store;
  auto& types = ctx.types;
  const std::string pass = "emit_clight";

  // Candidate types per subject, ordered by interning index for the
  // deterministic lexicographic enumeration.
  std::map<std::string, std::vector<std::pair<TypeRef, Tuple>>> cand_types;
  for (const auto& [t, k] : store.relation("type_evidence").rows) {
    auto& slot = cand_types[render_value(t[0])];
    TypeRef ty = t[1].as_type();
    bool seen = false;
    for (auto& [have, fact] : slot)
      if (type_eq(have, ty)) seen = true;
    if (!seen) slot.push_back({ty, t});
  }
  for (auto& [subj, slot] : cand_types)
    std::sort(slot.begin(), slot.end(), [](const auto& a, const auto& b) {
      return a.first->index < b.first->index;
    });

  std::map<std::string, std::string> func_of_node;
  for (const auto& [t, k] : store.relation("func_instr").rows)
    func_of_node[render_value(t[1])] = t[0].as_atom();

  // Call return types from reconciled signatures.
  std::map<std::string, TypeRef> sig_ret;
  for (const auto& [t, k] : store.relation("signature").rows)
    sig_ret[t[0].as_atom()] = t[2].as_type();

  const auto& csh = store.relation("csh_stmt").rows;
  for (const auto& [t, k] : csh) {
    NodeId n = t[0].as_node();
    const Stmt* st = as_stmt_node(t[1]);
    if (!st) continue;
    auto fit = func_of_node.find(render_value(t[0]));
    if (fit == func_of_node.end()) continue;
    const std::string& fname = fit->second;

    std::vector<Pseudo> vars;
    collect_stmt_vars(*st, vars);

    TypeRef call_ret;
    if (const auto* call = std::get_if<Scall>(st)) {
      auto sit = sig_ret.find(call->target);
      if (sit != sig_ret.end()) call_ret = sit->second;
    }

    // Per-variable candidate lists; missing evidence defaults to int with a
    // diagnostic.
    std::vector<std::vector<std::pair<TypeRef, std::optional<Tuple>>>> cands;
    for (Pseudo v : vars) {
      auto key = render_value(pseudo_subject(fname, v));
      auto cit = cand_types.find(key);
      if (cit == cand_types.end() || cit->second.empty()) {
        ctx.derive(pass, "diag",
                   {Value::node(n), Value::atom("untyped-variable"),
                    Value::atom("v" + std::to_string(v) +
                                " has no type candidate; defaulting to int")},
                   {{"csh_stmt", t}});
        cands.push_back({{types.int_type(32, true), std::nullopt}});
      } else {
        std::vector<std::pair<TypeRef, std::optional<Tuple>>> one;
        for (const auto& [ty, fact] : cit->second) one.push_back({ty, fact});
        cands.push_back(std::move(one));
      }
    }

    // Lexicographic enumeration with the per-statement cap.
    std::vector<size_t> idx(vars.size(), 0);
    size_t emitted = 0;
    bool capped = false;
    while (true) {
      if (emitted >= candidate_cap) {
        capped = true;
        break;
      }
      std::map<Pseudo, TypeRef> var_ty;
      std::vector<std::pair<std::string, Tuple>> because{{"csh_stmt", t}};
      for (size_t i = 0; i < vars.size(); ++i) {
        var_ty[vars[i]] = cands[i][idx[i]].first;
        if (cands[i][idx[i]].second)
          because.push_back({"type_evidence", *cands[i][idx[i]].second});
      }
      TypedBuild tb{types, var_ty};
      Stmt typed = tb.typed_stmt(*st, call_ret);
      Value sv = make_stmt(IrLevel::Clight, typed);
      ctx.derive(pass, "clight_stmt", {Value::node(n), sv}, because);
      for (size_t i = 0; i < vars.size(); ++i)
        ctx.derive(pass, "clight_types",
                   {Value::node(n), sv,
                    Value::integer(static_cast<int64_t>(vars[i])),
                    Value::type(var_ty[vars[i]])},
                   because);
      emitted++;

      // Advance the odometer.
      size_t i = 0;
      for (; i < vars.size(); ++i) {
        if (++idx[i] < cands[i].size()) break;
        idx[i] = 0;
      }
      if (i == vars.size()) break;
      if (vars.empty()) break;
    }
    if (capped)
      ctx.derive(pass, "diag",
                 {Value::node(n), Value::atom("candidate-cap"),
                  Value::atom("per-statement candidate cap reached")},
                 {{"csh_stmt", t}});
  }

  // Edges carry over.
  for (const auto& [t, k] : store.relation("csh_succ").rows)
    ctx.derive(pass, "clight_succ", t, {{"csh_succ", t}});
}

}  // namespace

Pass make_emit_clight(CTypeTable&, size_t candidate_cap) {
  return make_procedural_pass(
      "emit_clight",
      {"csh_stmt", "csh_succ", "type_evidence", "struct_hyp", "signature",
       "func_instr"},
      {"clight_stmt", "clight_types", "clight_succ", "diag"},
      [candidate_cap](PassContext& ctx) { run_emit_clight(ctx, candidate_cap); });
}

std::vector<Pass> build_pipeline(Workspace& ws, const PipelineOptions& opt) {
  std::vector<Pass> passes;
  passes.push_back(make_mach_prep());
  passes.push_back(make_lift_mach());
  if (opt.enable_alloca) passes.push_back(make_recognize_alloca());
  passes.push_back(make_mach_cover());
  passes.push_back(make_mach_cfg());
  passes.push_back(make_normalize_ltl(ws.types));
  passes.push_back(make_slot_analysis());
  passes.push_back(make_slot_dead());
  passes.push_back(make_recover_rtl());
  passes.push_back(make_rtl_optimize());
  passes.push_back(make_infer_types(ws.types));
  passes.push_back(make_recover_structs(ws.types));
  passes.push_back(make_reconcile_signatures(ws.types));
  passes.push_back(make_expr_trees());
  passes.push_back(make_to_csharpminor(ws.types));
  passes.push_back(make_structure_cfg());
  passes.push_back(make_emit_clight(ws.types, opt.candidate_cap));
  return passes;
}

}  // namespace reclift
