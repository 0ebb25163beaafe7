#include <doctest.h>

#include "reclift/frontend.hpp"
#include "reclift/schemas.hpp"

using namespace reclift;

TEST_CASE("operand forms from the running example") {
  auto blocks = parse_listing(
      "<fn classify 0x401000>\n"
      "401000: mov %rdi,-0x8(%rbp)\n"
      "401010: movss 0x4(%rax),%xmm0\n");
  REQUIRE(blocks.size() == 1);
  REQUIRE(blocks[0].lines.size() == 2);

  const auto& mov = blocks[0].lines[0];
  CHECK(mov.address == 0x401000);
  CHECK(mov.mnemonic == "mov");
  REQUIRE(mov.operands.size() == 2);
  CHECK(mov.operands[0].kind == AsmOperand::Kind::Reg);
  CHECK(mov.operands[0].reg == "rdi");
  CHECK(mov.operands[0].width == 64);
  CHECK(mov.operands[1].kind == AsmOperand::Kind::Mem);
  CHECK(mov.operands[1].base == "rbp");
  CHECK(mov.operands[1].imm == -8);

  const auto& movss = blocks[0].lines[1];
  CHECK(movss.mnemonic == "movss");
  CHECK(movss.operands[0].kind == AsmOperand::Kind::Mem);
  CHECK(movss.operands[0].base == "rax");
  CHECK(movss.operands[0].imm == 4);
  CHECK(movss.operands[1].kind == AsmOperand::Kind::Reg);
  CHECK(movss.operands[1].reg == "xmm0");
}

TEST_CASE("block structure, comments, multiple functions") {
  auto blocks = parse_listing(
      "# a comment line\n"
      "<fn f 0x1000>\n"
      "1000: nop   # trailing comment\n"
      "1001: ret\n"
      "\n"
      "<fn g 0x2000>\n"
      "2000: jmp 2000\n");
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].name == "f");
  CHECK(blocks[0].entry == 0x1000);
  CHECK(blocks[0].lines.size() == 2);
  CHECK(blocks[1].name == "g");
  CHECK(blocks[1].lines[0].operands[0].kind == AsmOperand::Kind::Imm);
  CHECK(blocks[1].lines[0].operands[0].imm == 0x2000);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_listing("<fn f 0x1000>\nbogus line\n"),
                       doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_listing("<fn f 0x1000>\n1000: mov %nosuch,%rax\n"),
      doctest::Contains("nosuch"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_listing("<fn f 0x1>\n1: ret\n\n<fn f 0x2>\n2: ret\n"),
      doctest::Contains("duplicate"), ParseError);
  CHECK_THROWS_AS(parse_listing("1000: ret\n"), ParseError);
}

TEST_CASE("memory operand varieties") {
  auto blocks = parse_listing(
      "<fn f 0x1000>\n"
      "1000: mov (%rax),%ebx\n"
      "1003: mov 0x8(%rax,%rcx,4),%edx\n"
      "1008: movss gfloat(%rip),%xmm1\n"
      "100d: lea -0x10(%rbp),%rax\n"
      "1012: call strlen\n");
  const auto& ls = blocks[0].lines;
  CHECK(ls[0].operands[0].base == "rax");
  CHECK(ls[0].operands[0].imm == 0);
  CHECK(ls[1].operands[0].index == "rcx");
  CHECK(ls[1].operands[0].scale == 4);
  CHECK(ls[1].operands[0].imm == 8);
  CHECK(ls[2].operands[0].kind == AsmOperand::Kind::Mem);
  CHECK(ls[2].operands[0].sym == "gfloat");
  CHECK(ls[3].operands[0].imm == -16);
  CHECK(ls[4].operands[0].kind == AsmOperand::Kind::Sym);
  CHECK(ls[4].operands[0].sym == "strlen");
}

TEST_CASE("mnemonic classification") {
  CHECK(classify_mnemonic("mov").stem == "mov");
  CHECK(classify_mnemonic("movl").stem == "mov");
  CHECK(classify_mnemonic("movl").suffix_width == 32);
  CHECK(classify_mnemonic("movq").suffix_width == 64);
  CHECK(classify_mnemonic("movslq").stem == "movslq");
  CHECK(classify_mnemonic("movsd").stem == "movsd");
  CHECK(classify_mnemonic("movsd").suffix_width == 0);
  CHECK(classify_mnemonic("cltd").stem == "cdq");
  CHECK(classify_mnemonic("cqto").stem == "cqo");
  CHECK(classify_mnemonic("endbr64").ignored);
  CHECK_FALSE(classify_mnemonic("vfmadd231ps").supported);
  CHECK(is_jcc("jle"));
  CHECK(cc_condition("jle") == Cond::Cle);
  CHECK(cc_condition("ja") == Cond::Cgtu);
  CHECK(cc_condition("sete") == Cond::Ceq);
  CHECK(cc_condition("js") == Cond::Clt);

  AsmInst movq{"mov",
               {AsmOperand{AsmOperand::Kind::Reg, "rdi", 64, 0, "", "", 1, ""},
                AsmOperand{AsmOperand::Kind::Mem, "", 0, -8, "rbp", "", 1, ""}}};
  CHECK(op_width(movq) == 64);
  AsmInst movss{"movss",
                {AsmOperand{AsmOperand::Kind::Mem, "", 0, 4, "rax", "", 1, ""},
                 AsmOperand{AsmOperand::Kind::Reg, "xmm0", 128, 0, "", "", 1,
                            ""}}};
  CHECK(op_width(movss) == 32);
}

TEST_CASE("validate reports without failing") {
  auto blocks = parse_listing(
      "<fn f 0x1000>\n"
      "1000: endbr64\n"
      "1004: frob %rax\n"
      "1008: jmp 9999\n"
      "1002: ret\n");
  auto diags = validate(blocks);
  auto has = [&](const std::string& cat) {
    for (const auto& d : diags)
      if (d.category == cat) return true;
    return false;
  };
  CHECK(has("ignored-mnemonic"));
  CHECK(has("unsupported-mnemonic"));
  CHECK(has("dangling-jump"));
  CHECK(has("non-monotone-address"));

  auto clean = parse_listing(
      "<fn g 0x2000>\n"
      "2000: mov %edi,%eax\n"
      "2002: ret\n");
  CHECK(validate(clean).empty());
}

TEST_CASE("to_edb populates the extensional store") {
  Store store;
  declare_level_schemas(store);
  auto blocks = parse_listing(
      "<fn f 0x1000>\n"
      "1000: mov %edi,%eax\n"
      "1002: add $0x1,%eax\n"
      "1005: ret\n");
  uint64_t before = store.tokens_issued();
  to_edb(blocks, store);

  CHECK(store.relation("instr").rows.size() == 3);
  CHECK(store.relation("instr_next").rows.size() == 2);
  CHECK(store.relation("func").rows.size() == 1);
  CHECK(store.relation("func_instr").rows.size() == 3);
  // One token per extensional tuple.
  size_t tuples = store.relation("instr").rows.size() +
                  store.relation("instr_next").rows.size() +
                  store.relation("func").rows.size() +
                  store.relation("func_instr").rows.size() +
                  store.relation("reg_map").rows.size();
  CHECK(store.tokens_issued() - before == tuples);

  // Platform register mapping.
  CHECK(store.has("reg_map", {Value::atom("rdi"), Value::reg(MachReg::DI)}));
  CHECK(store.has("reg_map", {Value::atom("rax"), Value::reg(MachReg::AX)}));
  CHECK(store.has("reg_map", {Value::atom("xmm0"), Value::reg(MachReg::X0)}));

  // Node ids stay in the concrete address range.
  for (const auto& [t, ann] : store.relation("instr").rows)
    CHECK_FALSE(t[0].as_node().is_synthetic());

  SUBCASE("empty listing leaves a declared, empty store") {
    Store s2;
    declare_level_schemas(s2);
    to_edb({}, s2);
    CHECK(s2.relation("instr").rows.empty());
    CHECK(s2.is_declared("instr"));
  }
}

TEST_CASE("render/parse round trip at the listing level") {
  std::string text =
      "<fn classify 0x401000>\n"
      "401000: endbr64\n"
      "401004: push %rbp\n"
      "401005: mov %rsp,%rbp\n"
      "401008: mov %rdi,-0x8(%rbp)\n"
      "40100c: mov -0x8(%rbp),%rax\n"
      "401010: mov (%rax),%eax\n"
      "401012: test %eax,%eax\n"
      "401014: jle 401030\n"
      "401016: mov -0x8(%rbp),%rax\n"
      "40101a: movss 0x4(%rax),%xmm0\n"
      "40101f: jmp 401036\n"
      "401030: movss gf(%rip),%xmm0\n"
      "401036: pop %rbp\n"
      "401037: ret\n";
  auto blocks = parse_listing(text);
  auto rendered = render_listing(blocks);
  auto reparsed = parse_listing(rendered);
  CHECK(render_listing(reparsed) == rendered);
  REQUIRE(reparsed.size() == blocks.size());
  CHECK(reparsed[0].lines.size() == blocks[0].lines.size());
  for (size_t i = 0; i < blocks[0].lines.size(); ++i) {
    CHECK(reparsed[0].lines[i].address == blocks[0].lines[i].address);
    CHECK(reparsed[0].lines[i].mnemonic == blocks[0].lines[i].mnemonic);
  }
}
