#include <charconv>
#include <cstring>

#include "reclift/ir.hpp"

// Parser for the canonical statement and value syntax; the inverse of the
// render functions in ir.cpp and value.cpp.

namespace reclift {

namespace {

struct Reader {
  const std::string& s;
  size_t i = 0;
  CTypeTable& types;

  [[noreturn]] void fail(const std::string& why) const {
    throw IrError("parse error at offset " + std::to_string(i) + " in \"" + s +
                  "\": " + why);
  }
  bool done() const { return i >= s.size(); }
  char peek() const { return done() ? '\0' : s[i]; }
  bool eat(char c) {
    if (peek() == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool eat(const char* w) {
    size_t n = strlen(w);
    if (s.compare(i, n, w) == 0) {
      i += n;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }
  void skip_ws() {
    while (!done() && s[i] == ' ') ++i;
  }
  void sep() {  // ", "
    skip_ws();
    expect(',');
    skip_ws();
  }

  std::string ident() {
    skip_ws();
    size_t start = i;
    while (!done()) {
      char c = s[i];
      auto u = static_cast<unsigned char>(c);
      if (std::isalnum(u) || c == '_' || c == '.' || c == '$')
        ++i;
      else
        break;
    }
    if (start == i) fail("expected identifier");
    return s.substr(start, i - start);
  }

  int64_t integer() {
    skip_ws();
    int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data() + i, s.data() + s.size(), v);
    if (ec != std::errc() || p == s.data() + i) fail("expected integer");
    i = static_cast<size_t>(p - s.data());
    return v;
  }

  NodeId node() {
    skip_ws();
    expect('@');
    if (eat("syn")) return NodeId::synthetic(static_cast<uint64_t>(integer()));
    uint64_t v = 0;
    auto [p, ec] =
        std::from_chars(s.data() + i, s.data() + s.size(), v, 16);
    if (ec != std::errc() || p == s.data() + i) fail("expected hex address");
    i = static_cast<size_t>(p - s.data());
    return NodeId::addr(v);
  }

  MachReg mreg() {
    auto name = ident();
    auto r = mach_reg_from(name);
    if (!r) fail("unknown register " + name);
    return *r;
  }

  Pseudo pseudo() {
    skip_ws();
    expect('p');
    return static_cast<Pseudo>(integer());
  }

  template <class R>
  std::vector<R> reg_list() {
    skip_ws();
    expect('[');
    std::vector<R> out;
    skip_ws();
    if (eat(']')) return out;
    while (true) {
      if constexpr (std::is_same_v<R, MachReg>)
        out.push_back(mreg());
      else
        out.push_back(pseudo());
      skip_ws();
      if (eat(']')) break;
      sep();
    }
    return out;
  }

  MachTy machty() {
    auto name = ident();
    auto t = mach_ty_from(name);
    if (!t) fail("unknown machine type " + name);
    return *t;
  }

  Chunk chunk() {
    auto name = ident();
    auto c = chunk_from(name);
    if (!c) fail("unknown chunk " + name);
    return *c;
  }

  Cond cond() {
    auto name = ident();
    auto c = cond_from(name);
    if (!c) fail("unknown condition " + name);
    return *c;
  }

  OpCode opcode() {
    OpCode op;
    op.name = ident();
    // Optional (Cond) and/or (imm) groups.
    while (peek() == '(') {
      size_t save = i;
      ++i;
      skip_ws();
      char c = peek();
      if (std::isalpha(static_cast<unsigned char>(c))) {
        auto name = ident();
        auto cd = cond_from(name);
        if (cd && eat(')')) {
          op.cond = *cd;
          continue;
        }
        i = save;  // argument list of an expression, not part of the opcode
        break;
      }
      if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
        int64_t v = integer();
        if (eat(')')) {
          op.imm = v;
          continue;
        }
      }
      i = save;
      break;
    }
    return op;
  }

  Addressing addressing() {
    auto name = ident();
    expect('(');
    Addressing a;
    if (name == "Aindexed") {
      a = Addressing::indexed(integer());
    } else if (name == "Aindexed2scaled") {
      int sc = static_cast<int>(integer());
      sep();
      a = Addressing::indexed2(sc, integer());
    } else if (name == "Aglobal") {
      auto sym = ident();
      sep();
      a = Addressing::global(sym, integer());
    } else if (name == "Ainstack") {
      a = Addressing::stack(integer());
    } else {
      fail("unknown addressing " + name);
    }
    expect(')');
    return a;
  }

  std::pair<StackBase, int64_t> stack_ofs() {
    skip_ws();
    if (eat("sp:")) return {StackBase::SP, integer()};
    return {StackBase::BP, integer()};
  }

  std::optional<int64_t> opt_imm() {
    skip_ws();
    if (eat('_')) return std::nullopt;
    return integer();
  }

  TypeRef opt_type_suffix() {
    if (peek() == ':') {
      ++i;
      return types.parse_prefix(s, i);
    }
    return nullptr;
  }

  ExprPtr expr() {
    skip_ws();
    ExprPtr e;
    char c = peek();
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
      e = Expr::constant(integer());
    } else if (c == '&') {
      ++i;
      e = Expr::symbol(ident());
    } else {
      auto name = ident();
      if (name.size() > 1 && name[0] == 'v' &&
          std::all_of(name.begin() + 1, name.end(), [](char ch) {
            return std::isdigit(static_cast<unsigned char>(ch));
          })) {
        e = Expr::variable(static_cast<Pseudo>(std::stoul(name.substr(1))));
      } else if (name == "Eload") {
        expect('(');
        Chunk ck = chunk();
        sep();
        ExprPtr addr = expr();
        expect(')');
        e = Expr::load(ck, std::move(addr));
      } else if (name == "Efield") {
        expect('(');
        ExprPtr base = expr();
        sep();
        auto fname = ident();
        expect(')');
        e = Expr::member(std::move(base), fname);
      } else {
        // Operator application: unop or binop, with an optional condition or
        // immediate group before the argument list.
        OpCode op;
        op.name = name;
        expect('(');
        skip_ws();
        if (std::isupper(static_cast<unsigned char>(peek()))) {
          size_t save = i;
          auto inner = ident();
          auto cd = cond_from(inner);
          if (cd && peek() == ')') {
            ++i;
            op.cond = *cd;
            expect('(');
          } else {
            i = save;
          }
        } else if (peek() == '-' ||
                   std::isdigit(static_cast<unsigned char>(peek()))) {
          size_t save = i;
          int64_t v = integer();
          if (eat(')') && peek() == '(') {
            op.imm = v;
            expect('(');
          } else {
            i = save;
          }
        }
        ExprPtr a = expr();
        skip_ws();
        if (eat(')')) {
          e = Expr::unop(std::move(op), std::move(a));
        } else {
          sep();
          ExprPtr b = expr();
          expect(')');
          e = Expr::binop(std::move(op), std::move(a), std::move(b));
        }
      }
    }
    TypeRef ty = opt_type_suffix();
    if (ty) {
      auto copy = std::make_shared<Expr>(*e);
      copy->ty = std::move(ty);
      e = copy;
    }
    return e;
  }

  ExprPtr opt_expr() {
    skip_ws();
    if (peek() == '_') {
      ++i;
      return nullptr;
    }
    return expr();
  }

  AsmOperand asm_operand() {
    auto name = ident();
    expect('(');
    AsmOperand op;
    if (name == "reg") {
      op.kind = AsmOperand::Kind::Reg;
      op.reg = ident();
      sep();
      op.width = static_cast<int>(integer());
    } else if (name == "imm") {
      op.kind = AsmOperand::Kind::Imm;
      op.imm = integer();
    } else if (name == "mem") {
      op.kind = AsmOperand::Kind::Mem;
      skip_ws();
      if (!eat('_')) op.base = ident();
      sep();
      if (!eat('_')) op.index = ident();
      sep();
      op.scale = static_cast<int>(integer());
      sep();
      op.imm = integer();
    } else if (name == "smem") {
      op.kind = AsmOperand::Kind::Mem;
      op.sym = ident();
      sep();
      op.imm = integer();
    } else if (name == "sym") {
      op.kind = AsmOperand::Kind::Sym;
      op.sym = ident();
    } else {
      fail("unknown operand form " + name);
    }
    expect(')');
    return op;
  }
};

MachInst parse_mach(Reader& r, const std::string& ctor) {
  if (ctor == "Msetstack") {
    Msetstack n{};
    r.expect('(');
    n.src = r.mreg();
    r.sep();
    std::tie(n.base, n.ofs) = r.stack_ofs();
    r.sep();
    n.ty = r.machty();
    r.expect(')');
    return n;
  }
  if (ctor == "Mgetstack") {
    Mgetstack n{};
    r.expect('(');
    std::tie(n.base, n.ofs) = r.stack_ofs();
    r.sep();
    n.ty = r.machty();
    r.sep();
    n.dst = r.mreg();
    r.expect(')');
    return n;
  }
  if (ctor == "Mload" || ctor == "Mstore") {
    Chunk ck;
    Addressing a;
    std::vector<MachReg> args;
    MachReg last;
    r.expect('(');
    ck = r.chunk();
    r.sep();
    a = r.addressing();
    r.sep();
    args = r.reg_list<MachReg>();
    r.sep();
    last = r.mreg();
    r.expect(')');
    if (ctor == "Mload") return Mload{ck, a, std::move(args), last};
    return Mstore{ck, a, std::move(args), last};
  }
  if (ctor == "Mop") {
    Mop n{};
    r.expect('(');
    n.op = r.opcode();
    r.sep();
    n.args = r.reg_list<MachReg>();
    r.sep();
    n.dst = r.mreg();
    r.expect(')');
    return n;
  }
  if (ctor == "Mcall") {
    r.expect('(');
    auto t = r.ident();
    r.expect(')');
    return Mcall{t};
  }
  if (ctor == "Mcond") {
    Mcond n{};
    r.expect('(');
    n.cond = r.cond();
    r.sep();
    n.width = static_cast<int>(r.integer());
    r.sep();
    n.args = r.reg_list<MachReg>();
    r.sep();
    n.imm = r.opt_imm();
    r.sep();
    n.iftrue = r.node();
    r.sep();
    n.iffalse = r.node();
    r.expect(')');
    return n;
  }
  if (ctor == "Mreturn") return Mreturn{};
  if (ctor == "Mbuiltin") {
    Mbuiltin n{};
    r.expect('(');
    n.name = r.ident();
    r.sep();
    n.args = r.reg_list<MachReg>();
    r.sep();
    r.skip_ws();
    if (!r.eat('_')) n.dst = r.mreg();
    r.expect(')');
    return n;
  }
  r.fail("unknown Mach constructor " + ctor);
}

LtlInst parse_ltl(Reader& r, const std::string& ctor) {
  if (ctor == "Lgetstack") {
    Lgetstack n{};
    r.expect('(');
    auto k = slot_kind_from(r.ident());
    if (!k) r.fail("bad slot kind");
    n.slot = *k;
    r.sep();
    n.ofs = r.integer();
    r.sep();
    n.ty = r.machty();
    r.sep();
    n.dst = r.mreg();
    r.expect(')');
    return n;
  }
  if (ctor == "Lsetstack") {
    Lsetstack n{};
    r.expect('(');
    n.src = r.mreg();
    r.sep();
    auto k = slot_kind_from(r.ident());
    if (!k) r.fail("bad slot kind");
    n.slot = *k;
    r.sep();
    n.ofs = r.integer();
    r.sep();
    n.ty = r.machty();
    r.expect(')');
    return n;
  }
  if (ctor == "Lop") {
    Lop n{};
    r.expect('(');
    n.op = r.opcode();
    r.sep();
    n.args = r.reg_list<MachReg>();
    r.sep();
    n.dst = r.mreg();
    r.expect(')');
    return n;
  }
  if (ctor == "Lload" || ctor == "Lstore") {
    Chunk ck;
    Addressing a;
    std::vector<MachReg> args;
    MachReg last;
    r.expect('(');
    ck = r.chunk();
    r.sep();
    a = r.addressing();
    r.sep();
    args = r.reg_list<MachReg>();
    r.sep();
    last = r.mreg();
    r.expect(')');
    if (ctor == "Lload") return Lload{ck, a, std::move(args), last};
    return Lstore{ck, a, std::move(args), last};
  }
  if (ctor == "Lcall") {
    r.expect('(');
    auto t = r.ident();
    r.expect(')');
    return Lcall{t};
  }
  if (ctor == "Lcond") {
    Lcond n{};
    r.expect('(');
    n.cond = r.cond();
    r.sep();
    n.width = static_cast<int>(r.integer());
    r.sep();
    n.args = r.reg_list<MachReg>();
    r.sep();
    n.imm = r.opt_imm();
    r.sep();
    n.iftrue = r.node();
    r.sep();
    n.iffalse = r.node();
    r.expect(')');
    return n;
  }
  if (ctor == "Lreturn") return Lreturn{};
  if (ctor == "Lbuiltin") {
    Lbuiltin n{};
    r.expect('(');
    n.name = r.ident();
    r.sep();
    n.args = r.reg_list<MachReg>();
    r.sep();
    r.skip_ws();
    if (!r.eat('_')) n.dst = r.mreg();
    r.expect(')');
    return n;
  }
  r.fail("unknown LTL constructor " + ctor);
}

RtlInst parse_rtl(Reader& r, const std::string& ctor) {
  if (ctor == "Iop") {
    Iop n{};
    r.expect('(');
    n.op = r.opcode();
    r.sep();
    n.args = r.reg_list<Pseudo>();
    r.sep();
    n.dst = r.pseudo();
    r.expect(')');
    return n;
  }
  if (ctor == "Iload" || ctor == "Istore") {
    Chunk ck;
    Addressing a;
    std::vector<Pseudo> args;
    Pseudo last;
    r.expect('(');
    ck = r.chunk();
    r.sep();
    a = r.addressing();
    r.sep();
    args = r.reg_list<Pseudo>();
    r.sep();
    last = r.pseudo();
    r.expect(')');
    if (ctor == "Iload") return Iload{ck, a, std::move(args), last};
    return Istore{ck, a, std::move(args), last};
  }
  if (ctor == "Icall") {
    Icall n{};
    r.expect('(');
    n.target = r.ident();
    r.sep();
    n.args = r.reg_list<Pseudo>();
    r.sep();
    r.skip_ws();
    if (!r.eat('_')) n.dst = r.pseudo();
    r.expect(')');
    return n;
  }
  if (ctor == "Icond") {
    Icond n{};
    r.expect('(');
    n.cond = r.cond();
    r.sep();
    n.width = static_cast<int>(r.integer());
    r.sep();
    n.args = r.reg_list<Pseudo>();
    r.sep();
    n.imm = r.opt_imm();
    r.sep();
    n.iftrue = r.node();
    r.sep();
    n.iffalse = r.node();
    r.expect(')');
    return n;
  }
  if (ctor == "Ireturn") {
    Ireturn n{};
    r.expect('(');
    r.skip_ws();
    if (!r.eat('_')) n.value = r.pseudo();
    r.expect(')');
    return n;
  }
  if (ctor == "Ibuiltin") {
    Ibuiltin n{};
    r.expect('(');
    n.name = r.ident();
    r.sep();
    n.args = r.reg_list<Pseudo>();
    r.sep();
    r.skip_ws();
    if (!r.eat('_')) n.dst = r.pseudo();
    r.expect(')');
    return n;
  }
  r.fail("unknown RTL constructor " + ctor);
}

Stmt parse_high(Reader& r, const std::string& ctor) {
  if (ctor == "Sset") {
    Sset n{};
    r.expect('(');
    r.skip_ws();
    r.expect('v');
    n.dst = static_cast<Pseudo>(r.integer());
    n.dst_ty = r.opt_type_suffix();
    r.sep();
    n.e = r.expr();
    r.expect(')');
    return n;
  }
  if (ctor == "Sstore") {
    Sstore n{};
    r.expect('(');
    n.chunk = r.chunk();
    r.sep();
    n.addr = r.expr();
    r.sep();
    n.val = r.expr();
    r.expect(')');
    return n;
  }
  if (ctor == "Scall") {
    Scall n{};
    r.expect('(');
    r.skip_ws();
    if (!r.eat('_')) {
      r.expect('v');
      n.dst = static_cast<Pseudo>(r.integer());
      n.dst_ty = r.opt_type_suffix();
    }
    r.sep();
    n.target = r.ident();
    r.sep();
    r.expect('[');
    r.skip_ws();
    if (!r.eat(']')) {
      while (true) {
        n.args.push_back(r.expr());
        r.skip_ws();
        if (r.eat(']')) break;
        r.sep();
      }
    }
    r.expect(')');
    return n;
  }
  if (ctor == "Sifthenelse") {
    Sifthenelse n{};
    r.expect('(');
    n.cond = r.expr();
    r.sep();
    n.then_node = r.node();
    r.sep();
    n.else_node = r.node();
    r.expect(')');
    return n;
  }
  if (ctor == "Sloop") {
    r.expect('(');
    Sloop n{r.node()};
    r.expect(')');
    return n;
  }
  if (ctor == "Sblock") {
    r.expect('(');
    Sblock n{r.node()};
    r.expect(')');
    return n;
  }
  if (ctor == "Sexit") {
    r.expect('(');
    Sexit n{static_cast<int>(r.integer())};
    r.expect(')');
    return n;
  }
  if (ctor == "Sreturn") {
    Sreturn n{};
    r.expect('(');
    n.e = r.opt_expr();
    r.expect(')');
    return n;
  }
  if (ctor == "Sgoto") {
    r.expect('(');
    Sgoto n{r.node()};
    r.expect(')');
    return n;
  }
  if (ctor == "Sskip") return Sskip{};
  r.fail("unknown statement constructor " + ctor);
}

AsmInst parse_asm(Reader& r, const std::string& ctor) {
  if (ctor != "Araw") r.fail("unknown asm constructor " + ctor);
  AsmInst n;
  r.expect('(');
  n.mnemonic = r.ident();
  r.sep();
  r.expect('[');
  r.skip_ws();
  if (!r.eat(']')) {
    while (true) {
      n.operands.push_back(r.asm_operand());
      r.skip_ws();
      if (r.eat(']')) break;
      r.sep();
    }
  }
  r.expect(')');
  return n;
}

}  // namespace

Value parse_stmt(IrLevel level, const std::string& text, CTypeTable& types) {
  Reader r{text, 0, types};
  auto ctor = r.ident();
  Value v;
  switch (level) {
    case IrLevel::X86Asm:
      v = make_stmt(level, parse_asm(r, ctor));
      break;
    case IrLevel::Mach:
      v = make_stmt(level, parse_mach(r, ctor));
      break;
    case IrLevel::Ltl:
      v = make_stmt(level, parse_ltl(r, ctor));
      break;
    case IrLevel::Rtl:
      v = make_stmt(level, parse_rtl(r, ctor));
      break;
    default:
      v = make_stmt(level, parse_high(r, ctor));
      break;
  }
  r.skip_ws();
  if (!r.done()) r.fail("trailing characters after statement");
  return v;
}

namespace {

Value parse_untagged(Reader& r);

Value parse_tuple_at(Reader& r) {
  r.expect('(');
  std::vector<Value> vs;
  r.skip_ws();
  if (r.eat(')')) return Value::tuple(std::move(vs));
  while (true) {
    vs.push_back(parse_untagged(r));
    r.skip_ws();
    if (r.eat(')')) break;
    r.sep();
  }
  return Value::tuple(std::move(vs));
}

std::string parse_quoted(Reader& r) {
  r.expect('"');
  std::string out;
  while (!r.done()) {
    char c = r.s[r.i++];
    if (c == '"') return out;
    if (c == '\\' && !r.done()) {
      char e = r.s[r.i++];
      switch (e) {
        case 'n':
          out += '\n';
          break;
        case 't':
          out += '\t';
          break;
        default:
          out += e;
      }
      continue;
    }
    out += c;
  }
  r.fail("unterminated string");
}

Value parse_untagged(Reader& r) {
  r.skip_ws();
  char c = r.peek();
  if (c == '@') return Value::node(r.node());
  if (c == '-' || std::isdigit(static_cast<unsigned char>(c)))
    return Value::integer(r.integer());
  if (c == '%') {
    ++r.i;
    return Value::reg(r.mreg());
  }
  if (c == '(') return parse_tuple_at(r);
  if (c == '"') return Value::atom(parse_quoted(r));
  if (r.eat("ty(")) {
    TypeRef t = r.types.parse_prefix(r.s, r.i);
    r.expect(')');
    return Value::type(t);
  }
  auto name = r.ident();
  if (auto ck = chunk_from(name)) return Value::chunk(*ck);
  return Value::atom(name);
}

}  // namespace

Value parse_value(const std::string& text, ValueTag tag,
                  std::optional<IrLevel> stmt_level, CTypeTable& types) {
  if (tag == ValueTag::Stmt) {
    if (!stmt_level) throw IrError("stmt column without a level tag");
    return parse_stmt(*stmt_level, text, types);
  }
  Reader r{text, 0, types};
  Value v;
  switch (tag) {
    case ValueTag::Node:
      v = Value::node(r.node());
      break;
    case ValueTag::Int:
      v = Value::integer(r.integer());
      break;
    case ValueTag::Reg:
      r.expect('%');
      v = Value::reg(r.mreg());
      break;
    case ValueTag::Chunk:
      v = Value::chunk(r.chunk());
      break;
    case ValueTag::Type: {
      if (!r.eat("ty(")) r.fail("expected ty(...)");
      v = Value::type(types.parse_prefix(r.s, r.i));
      r.expect(')');
      break;
    }
    case ValueTag::Atom:
      if (r.peek() == '"')
        v = Value::atom(parse_quoted(r));
      else
        v = Value::atom(r.ident());
      break;
    case ValueTag::Tuple:
      v = parse_tuple_at(r);
      break;
    default:
      r.fail("bad tag");
  }
  r.skip_ws();
  if (!r.done()) r.fail("trailing characters after value");
  return v;
}

}  // namespace reclift
