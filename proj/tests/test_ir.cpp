#include <doctest.h>

#include <random>

#include "reclift/ir.hpp"
#include "reclift/schemas.hpp"
#include "reclift/store.hpp"

using namespace reclift;

TEST_CASE("type interning is idempotent and injective") {
  CTypeTable tt;
  auto i1 = tt.int_type(32, true);
  auto i2 = tt.int_type(32, true);
  CHECK(i1 == i2);
  CHECK(type_eq(i1, i2));
  auto pi = tt.pointer_to(i1);
  auto pf = tt.pointer_to(tt.float_type(32));
  CHECK_FALSE(type_eq(pi, pf));
  CHECK(pi->text == "ptr(int)");

  auto s = tt.struct_of({{0, tt.int_type(32, true)}, {4, tt.float_type(32)}});
  CHECK(s->text == "struct{0:int,4:float}");
  CHECK(s->fields.size() == 2);
  CHECK(s->fields[0].name == "ofs_0");
  CHECK(s->fields[1].name == "ofs_4");
  CHECK_FALSE(s->degenerate);
  auto d = tt.struct_of({{0, tt.int_type(32, true)}});
  CHECK(d->degenerate);
  CHECK_THROWS_AS(tt.struct_of({{4, i1}, {0, i1}}), TypeError);

  // Bijection between distinct inserted types and indices.
  size_t n = tt.size();
  for (uint32_t i = 0; i < n; ++i) {
    for (uint32_t j = i + 1; j < n; ++j)
      CHECK_FALSE(type_eq(tt.by_index(i), tt.by_index(j)));
    CHECK(tt.parse(tt.by_index(i)->text) == tt.by_index(i));
  }
}

TEST_CASE("statement renders match the expected notation") {
  CTypeTable tt;
  auto ms = make_stmt(IrLevel::Mach,
                      MachInst{Msetstack{MachReg::DI, StackBase::BP, -8,
                                         MachTy::Tany64}});
  CHECK(ms.as_stmt()->text == "Msetstack(DI, -8, Tany64)");

  auto ml = make_stmt(
      IrLevel::Mach,
      MachInst{Mload{Chunk::MInt32, Addressing::indexed(0), {MachReg::AX},
                     MachReg::AX}});
  CHECK(ml.as_stmt()->text == "Mload(MInt32, Aindexed(0), [AX], AX)");

  auto lg = make_stmt(IrLevel::Ltl,
                      LtlInst{Lgetstack{SlotKind::Local, -8, MachTy::Tlong,
                                        MachReg::AX}});
  CHECK(lg.as_stmt()->text == "Lgetstack(Local, -8, Tlong, AX)");

  auto il = make_stmt(
      IrLevel::Rtl,
      RtlInst{Iload{Chunk::MFloat32, Addressing::indexed(4), {2}, 7}});
  CHECK(il.as_stmt()->text == "Iload(MFloat32, Aindexed(4), [p2], p7)");

  auto sset = make_stmt(
      IrLevel::Cminor,
      Stmt{Sset{3, Expr::binop(OpCode::simple("Oaddl"), Expr::variable(1),
                               Expr::constant(4))}});
  CHECK(sset.as_stmt()->text == "Sset(v3, Oaddl(v1, 4))");

  auto eload = make_stmt(
      IrLevel::Csharpminor,
      Stmt{Sset{5, Expr::load(Chunk::MFloat32,
                              Expr::binop(OpCode::simple("Oaddl"),
                                          Expr::variable(1),
                                          Expr::constant(4)))}});
  CHECK(eload.as_stmt()->text ==
        "Sset(v5, Eload(MFloat32, Oaddl(v1, 4)))");

  auto strct = tt.struct_of({{0, tt.int_type(32, true)},
                             {4, tt.float_type(32)}});
  auto efield = make_stmt(
      IrLevel::Clight,
      Stmt{Sset{5,
                Expr::member(Expr::variable(1, tt.pointer_to(strct)), "ofs_4",
                             tt.float_type(32)),
                tt.float_type(32)}});
  CHECK(efield.as_stmt()->text ==
        "Sset(v5:float, Efield(v1:ptr(struct{0:int,4:float}), "
        "ofs_4):float)");
}

namespace {

std::mt19937_64 rng(99);

MachReg rand_reg() { return static_cast<MachReg>(rng() % kMachRegCount); }
Chunk rand_chunk() { return static_cast<Chunk>(rng() % 9); }
NodeId rand_node() {
  if (rng() % 4 == 0) return NodeId::synthetic(rng() % 100);
  return NodeId::addr(0x400000 + rng() % 0x10000);
}
Addressing rand_addr() {
  switch (rng() % 4) {
    case 0:
      return Addressing::indexed(static_cast<int64_t>(rng() % 64) - 32);
    case 1:
      return Addressing::indexed2(1 << (rng() % 4),
                                  static_cast<int64_t>(rng() % 64));
    case 2:
      return Addressing::global("gsym" + std::to_string(rng() % 4),
                                static_cast<int64_t>(rng() % 8));
    default:
      return Addressing::stack(-static_cast<int64_t>(rng() % 64));
  }
}
OpCode rand_op() {
  switch (rng() % 3) {
    case 0:
      return OpCode::simple("Oaddl");
    case 1:
      return OpCode::with_imm("Oadd", static_cast<int64_t>(rng() % 100) - 50);
    default:
      return OpCode::with_cond("Ocmp", static_cast<Cond>(rng() % 10));
  }
}

MachInst rand_mach() {
  switch (rng() % 9) {
    case 0:
      return Msetstack{rand_reg(), rng() % 2 ? StackBase::SP : StackBase::BP,
                       static_cast<int64_t>(rng() % 64) - 32,
                       MachTy::Tany64};
    case 1:
      return Mgetstack{StackBase::BP, -static_cast<int64_t>(rng() % 64),
                       MachTy::Tlong, rand_reg()};
    case 2:
      return Mload{rand_chunk(), rand_addr(), {rand_reg()}, rand_reg()};
    case 3:
      return Mstore{rand_chunk(), rand_addr(), {rand_reg()}, rand_reg()};
    case 4:
      return Mop{rand_op(), {rand_reg(), rand_reg()}, rand_reg()};
    case 5:
      return Mcall{"fn" + std::to_string(rng() % 5)};
    case 6:
      return Mcond{static_cast<Cond>(rng() % 10), rng() % 2 ? 32 : 64,
                   {rand_reg()},
                   rng() % 2 ? std::optional<int64_t>(rng() % 100)
                             : std::nullopt,
                   rand_node(), rand_node()};
    case 7:
      return Mreturn{};
    default:
      return Mbuiltin{"alloca", {rand_reg()},
                      rng() % 2 ? std::optional<MachReg>(rand_reg())
                                : std::nullopt};
  }
}

ExprPtr rand_expr(CTypeTable& tt, int depth, bool typed) {
  TypeRef ty = typed ? tt.long_type(true) : nullptr;
  if (depth == 0 || rng() % 3 == 0) {
    switch (rng() % 3) {
      case 0:
        return Expr::constant(static_cast<int64_t>(rng() % 100) - 50, ty);
      case 1:
        return Expr::variable(static_cast<Pseudo>(rng() % 20), ty);
      default:
        return Expr::symbol("g" + std::to_string(rng() % 3), ty);
    }
  }
  switch (rng() % 4) {
    case 0:
      return Expr::unop(OpCode::simple("Onegl"), rand_expr(tt, depth - 1, typed),
                        ty);
    case 1:
      return Expr::binop(rand_op(), rand_expr(tt, depth - 1, typed),
                         rand_expr(tt, depth - 1, typed), ty);
    case 2:
      return Expr::load(rand_chunk(), rand_expr(tt, depth - 1, typed), ty);
    default:
      return Expr::member(rand_expr(tt, depth - 1, typed),
                          "ofs_" + std::to_string(4 * (rng() % 4)), ty);
  }
}

Stmt rand_high(CTypeTable& tt, bool typed) {
  switch (rng() % 10) {
    case 0:
      return Sset{static_cast<Pseudo>(rng() % 20), rand_expr(tt, 2, typed),
                  typed ? tt.long_type(true) : nullptr};
    case 1:
      return Sstore{rand_chunk(), rand_expr(tt, 2, typed),
                    rand_expr(tt, 1, typed)};
    case 2: {
      Scall c;
      if (rng() % 2) c.dst = static_cast<Pseudo>(rng() % 20);
      if (c.dst && typed) c.dst_ty = tt.long_type(true);
      c.target = "callee" + std::to_string(rng() % 3);
      for (size_t i = 0; i < rng() % 3; ++i)
        c.args.push_back(rand_expr(tt, 1, typed));
      return c;
    }
    case 3:
      return Sifthenelse{rand_expr(tt, 1, typed), rand_node(), rand_node()};
    case 4:
      return Sloop{rand_node()};
    case 5:
      return Sblock{rand_node()};
    case 6:
      return Sexit{static_cast<int>(rng() % 4)};
    case 7:
      return Sreturn{rng() % 2 ? rand_expr(tt, 1, typed) : nullptr};
    case 8:
      return Sgoto{rand_node()};
    default:
      return Sskip{};
  }
}

}  // namespace

TEST_CASE("render/parse round trip on random statements") {
  CTypeTable tt;
  for (int i = 0; i < 300; ++i) {
    Value v = make_stmt(IrLevel::Mach, rand_mach());
    Value back = parse_stmt(IrLevel::Mach, v.as_stmt()->text, tt);
    CHECK(back == v);
  }
  for (int i = 0; i < 300; ++i) {
    IrLevel lv = (i % 2) ? IrLevel::Csharpminor : IrLevel::Clight;
    Value v = make_stmt(lv, rand_high(tt, lv == IrLevel::Clight));
    Value back = parse_stmt(lv, v.as_stmt()->text, tt);
    CHECK(back == v);
    CHECK(back.as_stmt()->text == v.as_stmt()->text);
  }
}

TEST_CASE("render is injective per level on the random sample") {
  CTypeTable tt;
  std::map<std::string, Value> seen;
  for (int i = 0; i < 500; ++i) {
    Value v = make_stmt(IrLevel::Mach, rand_mach());
    auto [it, fresh] = seen.emplace(v.as_stmt()->text, v);
    if (!fresh) CHECK(it->second == v);
  }
}

TEST_CASE("level schemas cover each level once") {
  Store store;
  declare_level_schemas(store);
  int principals = 0;
  for (const auto& name : store.relation_names()) {
    const auto& s = store.schema(name);
    if (s.principal) principals++;
  }
  CHECK(principals == kIrLevelCount);
  CHECK(store.schema("mach_inst").principal);
  CHECK(store.schema("mach_inst").level == IrLevel::Mach);
  CHECK(store.schema("mach_inst").columns.size() == 2);
  CHECK(store.schema("mach_inst").columns[0].name == "n");
  CHECK(store.is_declared("clight_succ"));
  CHECK(store.is_declared("instr"));
  CHECK(store.is_declared("reg_map"));
  CHECK(store.is_declared("slot_desc"));
  CHECK(store.is_declared("type_evidence"));
  CHECK(store.is_declared("struct_hyp"));
  CHECK(store.is_declared("signature"));
}
