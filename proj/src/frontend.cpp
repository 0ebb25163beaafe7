#include "reclift/frontend.hpp"

#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace reclift {

namespace {

const std::map<std::string, RegInfo>& reg_table() {
  static const std::map<std::string, RegInfo> table = [] {
    std::map<std::string, RegInfo> t;
    const char* gpr64[] = {"rax", "rbx", "rcx", "rdx",
                           "rsi", "rdi", "rbp", "rsp"};
    const char* gpr32[] = {"eax", "ebx", "ecx", "edx",
                           "esi", "edi", "ebp", "esp"};
    const char* gpr16[] = {"ax", "bx", "cx", "dx", "si", "di", "bp", "sp"};
    const char* gpr8[] = {"al", "bl", "cl", "dl", "sil", "dil", "bpl", "spl"};
    const MachReg base[] = {MachReg::AX, MachReg::BX, MachReg::CX,
                            MachReg::DX, MachReg::SI, MachReg::DI,
                            MachReg::BP, MachReg::SP};
    for (int i = 0; i < 8; ++i) {
      t[gpr64[i]] = {base[i], 64};
      t[gpr32[i]] = {base[i], 32};
      t[gpr16[i]] = {base[i], 16};
      t[gpr8[i]] = {base[i], 8};
    }
    // High-byte registers alias the same webs at width 8.
    t["ah"] = {MachReg::AX, 8};
    t["bh"] = {MachReg::BX, 8};
    t["ch"] = {MachReg::CX, 8};
    t["dh"] = {MachReg::DX, 8};
    for (int i = 0; i < 8; ++i) {
      auto r = static_cast<MachReg>(static_cast<int>(MachReg::R8) + i);
      std::string name = "r" + std::to_string(8 + i);
      t[name] = {r, 64};
      t[name + "d"] = {r, 32};
      t[name + "w"] = {r, 16};
      t[name + "b"] = {r, 8};
    }
    for (int i = 0; i < 16; ++i) {
      auto r = static_cast<MachReg>(static_cast<int>(MachReg::X0) + i);
      t["xmm" + std::to_string(i)] = {r, 128};
    }
    return t;
  }();
  return table;
}

const std::set<std::string>& base_stems() {
  static const std::set<std::string> stems = {
      "mov", "movss", "movsd", "lea",  "add",  "sub",  "imul", "idiv",
      "and", "or",    "xor",   "not",  "neg",  "shl",  "shr",  "sar",
      "cmp", "test",  "jmp",   "call", "ret",  "push", "pop",  "cdq",
      "cqo", "nop",   "endbr64"};
  return stems;
}

const std::map<std::string, int>& extend_moves() {
  // AT&T zero/sign-extending moves: stem -> destination width.
  static const std::map<std::string, int> t = {
      {"movzbw", 16}, {"movzbl", 32}, {"movzbq", 64}, {"movzwl", 32},
      {"movzwq", 64}, {"movsbw", 16}, {"movsbl", 32}, {"movsbq", 64},
      {"movswl", 32}, {"movswq", 64}, {"movslq", 64}};
  return t;
}

const std::set<std::string>& cc_stems_jcc() {
  static const std::set<std::string> t = {"je", "jne", "jl",  "jle",
                                          "jg", "jge", "jb",  "jbe",
                                          "ja", "jae", "js",  "jns"};
  return t;
}

const std::set<std::string>& cc_stems_setcc() {
  static const std::set<std::string> t = {
      "sete", "setne", "setl", "setle", "setg", "setge",
      "setb", "setbe", "seta", "setae", "sets", "setns"};
  return t;
}

}  // namespace

std::optional<RegInfo> platform_reg(const std::string& name) {
  auto it = reg_table().find(name);
  if (it == reg_table().end()) return std::nullopt;
  return it->second;
}

MnemonicInfo classify_mnemonic(const std::string& written) {
  MnemonicInfo info;
  info.stem = written;
  // Alias spellings first.
  if (written == "cltd") info.stem = "cdq";
  if (written == "cqto") info.stem = "cqo";

  if (extend_moves().count(info.stem) || cc_stems_jcc().count(info.stem) ||
      cc_stems_setcc().count(info.stem)) {
    info.supported = true;
    return info;
  }
  if (base_stems().count(info.stem)) {
    info.supported = true;
    info.ignored = (info.stem == "endbr64" || info.stem == "nop");
    return info;
  }
  // Try stripping one size suffix.
  if (info.stem.size() > 1) {
    char last = info.stem.back();
    int width = last == 'b' ? 8 : last == 'w' ? 16 : last == 'l' ? 32
                                : last == 'q' ? 64 : 0;
    if (width) {
      std::string stripped = info.stem.substr(0, info.stem.size() - 1);
      if (base_stems().count(stripped)) {
        info.stem = stripped;
        info.suffix_width = width;
        info.supported = true;
        info.ignored = (stripped == "nop");
        return info;
      }
    }
  }
  return info;  // unsupported; stem stays as written
}

int op_width(const AsmInst& inst) {
  auto info = classify_mnemonic(inst.mnemonic);
  if (info.stem == "movss") return 32;
  if (info.stem == "movsd") return 64;
  auto em = extend_moves().find(info.stem);
  if (em != extend_moves().end()) return em->second;
  if (info.suffix_width) return info.suffix_width;
  int w = 0;
  for (const auto& op : inst.operands)
    if (op.kind == AsmOperand::Kind::Reg && op.width != 128)
      w = std::max(w, op.width);
  return w ? w : 32;
}

bool is_jcc(const std::string& stem) { return cc_stems_jcc().count(stem) > 0; }
bool is_setcc(const std::string& stem) {
  return cc_stems_setcc().count(stem) > 0;
}

Cond cc_condition(const std::string& stem) {
  std::string cc = stem;
  if (cc.rfind("set", 0) == 0)
    cc = cc.substr(3);
  else if (!cc.empty() && cc[0] == 'j')
    cc = cc.substr(1);
  if (cc == "e") return Cond::Ceq;
  if (cc == "ne") return Cond::Cne;
  if (cc == "l") return Cond::Clt;
  if (cc == "le") return Cond::Cle;
  if (cc == "g") return Cond::Cgt;
  if (cc == "ge") return Cond::Cge;
  if (cc == "b") return Cond::Cltu;
  if (cc == "be") return Cond::Cleu;
  if (cc == "a") return Cond::Cgtu;
  if (cc == "ae") return Cond::Cgeu;
  if (cc == "s") return Cond::Clt;   // sign set: < 0 after test r,r
  if (cc == "ns") return Cond::Cge;  // sign clear: >= 0
  throw ParseError("unknown condition code " + stem);
}

// ---- listing parser --------------------------------------------------------------

namespace {

struct LineReader {
  const std::string& s;
  size_t i = 0;
  int line_no;

  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("line " + std::to_string(line_no) + ": " + why +
                     " in \"" + s + "\"");
  }
  bool done() const { return i >= s.size(); }
  char peek() const { return done() ? '\0' : s[i]; }
  void skip_ws() {
    while (!done() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool eat(char c) {
    if (peek() == c) {
      ++i;
      return true;
    }
    return false;
  }

  // Numeric literals in operand position are hexadecimal with an optional
  // 0x prefix, matching objdump output; elsewhere the prefix selects hex.
  int64_t number(bool hex_default = false) {
    skip_ws();
    bool neg = eat('-');
    int base = hex_default ? 16 : 10;
    if (s.compare(i, 2, "0x") == 0) {
      base = 16;
      i += 2;
    }
    uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v, base);
    if (ec != std::errc() || p == s.data() + i) fail("expected a number");
    i = static_cast<size_t>(p - s.data());
    return neg ? -static_cast<int64_t>(v) : static_cast<int64_t>(v);
  }

  std::string ident() {
    skip_ws();
    size_t start = i;
    while (!done()) {
      char c = s[i];
      auto u = static_cast<unsigned char>(c);
      if (std::isalnum(u) || c == '_' || c == '.' || c == '@' || c == '$')
        ++i;
      else
        break;
    }
    if (start == i) fail("expected an identifier");
    return s.substr(start, i - start);
  }

  std::string reg_name() {
    if (!eat('%')) fail("expected %register");
    return ident();
  }

  bool looks_hex_from(size_t pos) const {
    if (pos >= s.size()) return false;
    char c = s[pos];
    return std::isdigit(static_cast<unsigned char>(c)) ||
           (c >= 'a' && c <= 'f');
  }

  AsmOperand operand() {
    skip_ws();
    AsmOperand op;
    if (eat('*')) {
      // Indirect target; kept as its inner operand, lifting rejects it.
      return operand();
    }
    if (peek() == '%') {
      std::string name = reg_name();
      auto info = platform_reg(name);
      if (!info) fail("unknown register %" + name);
      op.kind = AsmOperand::Kind::Reg;
      op.reg = name;
      op.width = info->width;
      return op;
    }
    if (eat('$')) {
      op.kind = AsmOperand::Kind::Imm;
      op.imm = number(true);
      return op;
    }
    // Displacement or symbol, optionally followed by (base, index, scale).
    int64_t disp = 0;
    std::string sym;
    char c = peek();
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      disp = number(true);
    } else if (c != '(') {
      sym = ident();
    }
    skip_ws();
    if (eat('(')) {
      op.kind = AsmOperand::Kind::Mem;
      op.imm = disp;
      skip_ws();
      if (peek() == '%') {
        op.base = reg_name();
        skip_ws();
      }
      if (eat(',')) {
        skip_ws();
        op.index = reg_name();
        skip_ws();
        if (eat(',')) op.scale = static_cast<int>(number());
        skip_ws();
      }
      if (!eat(')')) fail("expected ) in memory operand");
      if (op.base == "rip") {
        // rip-relative symbol reference
        op.base.clear();
        op.sym = sym;
        if (op.sym.empty()) fail("rip-relative operand needs a symbol");
        return op;
      }
      if (!sym.empty()) fail("symbol displacement with a register base");
      if (op.base.empty() && op.index.empty() && op.imm == 0)
        fail("empty memory operand");
      if (!op.base.empty() && !platform_reg(op.base))
        fail("unknown base register " + op.base);
      if (!op.index.empty() && !platform_reg(op.index))
        fail("unknown index register " + op.index);
      return op;
    }
    if (!sym.empty()) {
      op.kind = AsmOperand::Kind::Sym;
      op.sym = sym;
      return op;
    }
    // Bare number: a code address (jump/call target).
    op.kind = AsmOperand::Kind::Imm;
    op.imm = disp;
    return op;
  }
};

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  std::string s = pos == std::string::npos ? line : line.substr(0, pos);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.pop_back();
  return s;
}

}  // namespace

std::vector<FunctionBlock> parse_listing(const std::string& text) {
  std::vector<FunctionBlock> blocks;
  std::set<std::string> names;
  FunctionBlock* cur = nullptr;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    line_no++;
    std::string line = strip_comment(raw);
    size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) {
      cur = nullptr;  // blank line ends a block
      continue;
    }
    LineReader r{line, first, line_no};
    if (r.eat('<')) {
      // <fn NAME 0xADDR>
      auto kw = r.ident();
      if (kw != "fn") r.fail("expected <fn NAME 0xADDR>");
      FunctionBlock b;
      b.name = r.ident();
      b.entry = static_cast<uint64_t>(r.number());
      r.skip_ws();
      if (!r.eat('>')) r.fail("expected > to close the function header");
      if (!names.insert(b.name).second)
        r.fail("duplicate function name " + b.name);
      blocks.push_back(std::move(b));
      cur = &blocks.back();
      continue;
    }
    if (!cur) r.fail("instruction line outside a function block");
    ListingLine ll;
    ll.raw = line.substr(first);
    uint64_t addr = 0;
    {
      auto [p, ec] =
          std::from_chars(line.data() + r.i, line.data() + line.size(), addr, 16);
      if (ec != std::errc() || p == line.data() + r.i)
        r.fail("expected a hex address");
      r.i = static_cast<size_t>(p - line.data());
    }
    ll.address = addr;
    if (!r.eat(':')) r.fail("expected : after the address");
    ll.mnemonic = r.ident();
    r.skip_ws();
    if (!r.done()) {
      while (true) {
        ll.operands.push_back(r.operand());
        r.skip_ws();
        if (r.eat(',')) continue;
        break;
      }
      r.skip_ws();
      if (!r.done()) r.fail("trailing characters after operands");
    }
    cur->lines.push_back(std::move(ll));
  }
  for (const auto& b : blocks)
    if (b.lines.empty())
      throw ParseError("function " + b.name + " has no instructions");
  return blocks;
}

namespace {

std::string render_operand_att(const AsmOperand& op) {
  std::ostringstream os;
  switch (op.kind) {
    case AsmOperand::Kind::Reg:
      os << "%" << op.reg;
      break;
    case AsmOperand::Kind::Imm:
      if (op.imm < 0)
        os << "$-0x" << std::hex << -op.imm;
      else
        os << "$0x" << std::hex << op.imm;
      break;
    case AsmOperand::Kind::Mem:
      if (!op.sym.empty()) {
        os << op.sym << "(%rip)";
        break;
      }
      if (op.imm < 0)
        os << "-0x" << std::hex << -op.imm;
      else if (op.imm != 0)
        os << "0x" << std::hex << op.imm;
      os << "(";
      if (!op.base.empty()) os << "%" << op.base;
      if (!op.index.empty()) os << ",%" << op.index << "," << op.scale;
      os << ")";
      break;
    case AsmOperand::Kind::Sym:
      os << op.sym;
      break;
  }
  return os.str();
}

bool is_branch_target_ctx(const std::string& mnem) {
  auto info = classify_mnemonic(mnem);
  return info.stem == "jmp" || info.stem == "call" || is_jcc(info.stem);
}

}  // namespace

std::string render_listing(const std::vector<FunctionBlock>& blocks) {
  std::ostringstream os;
  bool first = true;
  for (const auto& b : blocks) {
    if (!first) os << "\n";
    first = false;
    os << "<fn " << b.name << " 0x" << std::hex << b.entry << ">\n";
    for (const auto& l : b.lines) {
      os << std::hex << l.address << ": " << l.mnemonic;
      for (size_t i = 0; i < l.operands.size(); ++i) {
        os << (i ? "," : " ");
        // Branch targets print as bare hex addresses.
        if (is_branch_target_ctx(l.mnemonic) &&
            l.operands[i].kind == AsmOperand::Kind::Imm)
          os << std::hex << l.operands[i].imm;
        else
          os << render_operand_att(l.operands[i]);
      }
      os << "\n";
    }
  }
  return os.str();
}

std::vector<FrontendDiagnostic> validate(
    const std::vector<FunctionBlock>& blocks) {
  std::vector<FrontendDiagnostic> out;
  std::set<uint64_t> known;
  for (const auto& b : blocks)
    for (const auto& l : b.lines) known.insert(l.address);
  for (const auto& b : blocks) {
    uint64_t prev = 0;
    bool first = true;
    for (const auto& l : b.lines) {
      if (!first && l.address <= prev)
        out.push_back({l.address, "non-monotone-address",
                       "address does not increase within " + b.name});
      prev = l.address;
      first = false;
      auto info = classify_mnemonic(l.mnemonic);
      if (!info.supported)
        out.push_back({l.address, "unsupported-mnemonic", l.mnemonic});
      else if (info.ignored)
        out.push_back({l.address, "ignored-mnemonic", l.mnemonic});
      if (info.stem == "jmp" || is_jcc(info.stem)) {
        for (const auto& op : l.operands)
          if (op.kind == AsmOperand::Kind::Imm &&
              !known.count(static_cast<uint64_t>(op.imm)))
            out.push_back({l.address, "dangling-jump",
                           "target outside every block"});
      }
    }
  }
  return out;
}

void to_edb(const std::vector<FunctionBlock>& blocks, Store& store) {
  for (const auto& [name, info] : reg_table()) {
    store.insert_extensional(
        "reg_map", {Value::atom(name), Value::reg(info.reg)});
  }
  for (const auto& b : blocks) {
    store.insert_extensional(
        "func", {Value::atom(b.name), Value::node(NodeId::addr(b.entry))});
    for (size_t i = 0; i < b.lines.size(); ++i) {
      const auto& l = b.lines[i];
      NodeId n = NodeId::addr(l.address);
      AsmInst inst{l.mnemonic, l.operands};
      std::ostringstream note;
      note << "0x" << std::hex << l.address << ": " << std::dec << l.raw;
      store.insert_extensional(
          "instr", {Value::node(n), make_stmt(IrLevel::X86Asm, inst)},
          note.str());
      store.insert_extensional("func_instr",
                               {Value::atom(b.name), Value::node(n)});
      if (i + 1 < b.lines.size())
        store.insert_extensional(
            "instr_next",
            {Value::node(n), Value::node(NodeId::addr(b.lines[i + 1].address))});
    }
  }
}

}  // namespace reclift
