#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "reclift/ir.hpp"
#include "reclift/schemas.hpp"
#include "reclift/store.hpp"

using namespace reclift;

namespace {

RelationSchema two_col(const std::string& name) {
  return RelationSchema{
      name,
      {Column{"a", ValueTag::Int, {}}, Column{"b", ValueTag::Atom, {}}},
      {},
      false};
}

Tuple ia(int64_t i, const std::string& a) {
  return Tuple{Value::integer(i), Value::atom(a)};
}

SemiringValue ptok(uint64_t id) {
  return SemiringValue::polynomial(Polynomial::from_token(Token{id}));
}

}  // namespace

TEST_CASE("declare is idempotent, mismatches rejected") {
  Store s;
  s.declare(two_col("r"));
  s.declare(two_col("r"));
  auto bad = two_col("r");
  bad.columns.push_back(Column{"c", ValueTag::Int, {}});
  CHECK_THROWS_AS(s.declare(bad), StoreError);
  CHECK_THROWS_AS(s.relation("missing"), StoreError);
}

TEST_CASE("insert combines with plus; zero rejected") {
  Store s;
  s.declare(two_col("r"));
  s.insert("r", ia(1, "a"), ptok(1));
  s.insert("r", ia(1, "a"), ptok(2));
  CHECK(render(s.annotation_of("r", ia(1, "a"))) == "x1 + x2");
  CHECK(render(s.annotation_of("r", ia(2, "zzz"))) == "0");
  CHECK_THROWS_AS(
      s.insert("r", ia(1, "a"), SemiringValue::zero(SemiringTag::Provenance)),
      StoreError);
  CHECK_THROWS_AS(s.insert("r", ia(1, "a"), SemiringValue::boolean(true)),
                  StoreError);
  CHECK_THROWS_AS(s.insert("r", Tuple{Value::integer(1)}, ptok(3)), StoreError);
  // Finite support: iteration never yields a zero annotation.
  for (auto& [t, k] : s.relation("r").rows)
    CHECK_FALSE(is_zero(k.total(s.term_cap())));
}

TEST_CASE("extensional inserts issue unique tokens") {
  Store s;
  s.declare(two_col("r"));
  auto t1 = s.insert_extensional("r", ia(1, "a"), "line one");
  auto t2 = s.insert_extensional("r", ia(2, "b"));
  CHECK(t1.id != t2.id);
  CHECK(s.tokens_issued() == 2);
  CHECK(s.token_info(t1.id).note == "line one");
  CHECK(s.token_info(t1.id).rel == "r");
}

TEST_CASE("candidates lists statements at a node in statement order") {
  Store s;
  declare_level_schemas(s);
  NodeId n = NodeId::addr(0x401000);
  auto s1 = make_stmt(IrLevel::Mach, MachInst{Mreturn{}});
  auto s2 = make_stmt(IrLevel::Mach,
                      MachInst{Mop{OpCode::simple("Omove"), {MachReg::AX},
                                   MachReg::BX}});
  s.insert("mach_inst", Tuple{Value::node(n), s1}, ptok(1));
  s.insert("mach_inst", Tuple{Value::node(n), s2}, ptok(2));
  auto cands = s.candidates(IrLevel::Mach, n);
  REQUIRE(cands.size() == 2);
  CHECK(cands[0].first.as_stmt()->text < cands[1].first.as_stmt()->text);
  CHECK(s.candidates(IrLevel::Mach, NodeId::addr(0x999)).empty());
  // Definitional equivalence with a brute-force scan of the relation.
  size_t found = 0;
  for (auto& [t, k] : s.relation("mach_inst").rows)
    if (t[0].as_node() == n) found++;
  CHECK(found == cands.size());
}

TEST_CASE("swap_out / swap_in transfer ownership") {
  Store s;
  s.declare(two_col("r"));
  s.declare(two_col("q"));
  s.insert("r", ia(1, "a"), ptok(1));

  SUBCASE("identity round trip") {
    auto before = render_relation(s, "r");
    auto b = s.swap_out({"r"});
    s.swap_in(std::move(b));
    CHECK(render_relation(s, "r") == before);
  }
  SUBCASE("tuples added to the bundle land in the store") {
    auto b = s.swap_out({"r"});
    b.get("r")->rows.emplace(
        ia(2, "b"),
        AnnPair{ptok(2), SemiringValue::zero(SemiringTag::Provenance)});
    s.swap_in(std::move(b));
    CHECK(render(s.annotation_of("r", ia(2, "b"))) == "x2");
  }
  SUBCASE("double checkout fails") {
    auto b = s.swap_out({"r", "q"});
    CHECK_THROWS_AS(s.swap_out({"q"}), StoreError);
    s.swap_in(std::move(b));
    auto b2 = s.swap_out({"q"});
    s.swap_in(std::move(b2));
  }
  SUBCASE("concurrent inserts merge with plus") {
    auto b = s.swap_out({"r"});
    s.insert("r", ia(1, "a"), ptok(5));
    s.swap_in(std::move(b));
    CHECK(render(s.annotation_of("r", ia(1, "a"))) == "x1 + x5");
  }
  SUBCASE("foreign bundles rejected") {
    Store other;
    other.declare(two_col("r"));
    auto b = other.swap_out({"r"});
    CHECK_THROWS_AS(s.swap_in(std::move(b)), StoreError);
  }
}

TEST_CASE("store_leq is reflexive and insert-monotone") {
  Store a;
  a.declare(two_col("r"));
  a.insert("r", ia(1, "a"), ptok(1));
  CHECK(store_leq(a, a));
  auto b = a.clone();
  b.insert("r", ia(2, "b"), ptok(2));
  CHECK(store_leq(a, b));
  CHECK_FALSE(store_leq(b, a));
  b.insert("r", ia(1, "a"), ptok(3));
  CHECK(store_leq(a, b));

  Store c;
  c.declare(two_col("other"));
  CHECK_THROWS_AS(store_leq(a, c), StoreError);
}

TEST_CASE("synthetic node allocation is monotone and in range") {
  Store s;
  auto n1 = s.alloc_synthetic();
  auto n2 = s.alloc_synthetic();
  CHECK(n1.is_synthetic());
  CHECK(n2.is_synthetic());
  CHECK(n1.value < n2.value);
  CHECK(n1.value >= NodeId::kSynBase);
}

TEST_CASE("stats histogram over clight candidates") {
  Store s;
  declare_level_schemas(s);
  CHECK(s.stats().clight_histogram.empty());
  CTypeTable tt;
  NodeId n1 = NodeId::addr(1), n2 = NodeId::addr(2);
  auto mk = [&](Pseudo v, TypeRef ty) {
    return make_stmt(IrLevel::Clight,
                     Stmt{Sset{v, Expr::constant(0, ty), ty}});
  };
  s.insert("clight_stmt", Tuple{Value::node(n1), mk(1, tt.long_type(true))},
           ptok(1));
  s.insert("clight_stmt", Tuple{Value::node(n2), mk(2, tt.long_type(true))},
           ptok(2));
  s.insert("clight_stmt",
           Tuple{Value::node(n2), mk(2, tt.pointer_to(tt.long_type(true)))},
           ptok(3));
  auto st = s.stats();
  CHECK(st.clight_histogram[1] == 1);
  CHECK(st.clight_histogram[2] == 1);
  size_t total_nodes = 0;
  for (auto& [count, nodes] : st.clight_histogram) total_nodes += nodes;
  CHECK(total_nodes == 2);
  CHECK(st.tuple_counts["clight_stmt"] == 3);
}

TEST_CASE("fact dump round-trips losslessly") {
  namespace fs = std::filesystem;
  Store s;
  declare_level_schemas(s);
  CTypeTable tt;
  NodeId n = NodeId::addr(0x401000);
  s.insert_extensional(
      "instr",
      Tuple{Value::node(n),
            make_stmt(IrLevel::X86Asm, AsmInst{"mov",
                                               {AsmOperand{
                                                    AsmOperand::Kind::Reg,
                                                    "rdi", 64, 0, "", "", 1,
                                                    ""},
                                                AsmOperand{
                                                    AsmOperand::Kind::Mem, "",
                                                    0, -8, "rbp", "", 1,
                                                    ""}}})},
      "0x401000: mov %rdi,-0x8(%rbp)");
  s.insert("type_evidence",
           Tuple{Value::tuple({Value::atom("p"), Value::atom("f"),
                               Value::integer(3)}),
                 Value::type(tt.pointer_to(tt.struct_of(
                     {{0, tt.int_type(32, true)}, {4, tt.float_type(32)}}))),
                 Value::atom("pointer-deref")},
           ptok(9));
  s.insert("diag", Tuple{Value::node(n), Value::atom("unsupported"),
                         Value::atom("odd mnemonic: foo bar")},
           ptok(10));

  auto dir = fs::temp_directory_path() / "reclift_store_test";
  fs::remove_all(dir);
  dump_facts(s, dir.string());

  Store loaded;
  CTypeTable tt2;
  load_facts(loaded, dir.string(), tt2);
  auto dir2 = fs::temp_directory_path() / "reclift_store_test2";
  fs::remove_all(dir2);
  dump_facts(loaded, dir2.string());

  for (const auto& name : s.relation_names()) {
    CHECK(render_relation(s, name) == render_relation(loaded, name));
  }
  fs::remove_all(dir);
  fs::remove_all(dir2);
}
