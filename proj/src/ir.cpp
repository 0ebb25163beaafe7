#include "reclift/ir.hpp"

#include <array>
#include <sstream>

namespace reclift {

namespace {

constexpr std::array<const char*, 6> kMachTyNames = {
    "Tint", "Tlong", "Tsingle", "Tfloat", "Tany32", "Tany64"};
constexpr std::array<const char*, 10> kCondNames = {
    "Ceq", "Cne", "Clt", "Cle", "Cgt", "Cge", "Cltu", "Cleu", "Cgtu", "Cgeu"};
constexpr std::array<const char*, 3> kSlotKindNames = {"Local", "Incoming",
                                                       "Outgoing"};

}  // namespace

const char* to_string(MachTy t) { return kMachTyNames[static_cast<int>(t)]; }

std::optional<MachTy> mach_ty_from(const std::string& name) {
  for (size_t i = 0; i < kMachTyNames.size(); ++i)
    if (name == kMachTyNames[i]) return static_cast<MachTy>(i);
  return std::nullopt;
}

MachTy chunk_mach_ty(Chunk c) {
  switch (c) {
    case Chunk::MFloat32:
      return MachTy::Tsingle;
    case Chunk::MFloat64:
      return MachTy::Tfloat;
    case Chunk::MInt64:
      return MachTy::Tlong;
    case Chunk::Many64:
      return MachTy::Tany64;
    default:
      return MachTy::Tint;
  }
}

const char* to_string(Cond c) { return kCondNames[static_cast<int>(c)]; }

std::optional<Cond> cond_from(const std::string& name) {
  for (size_t i = 0; i < kCondNames.size(); ++i)
    if (name == kCondNames[i]) return static_cast<Cond>(i);
  return std::nullopt;
}

Cond negate(Cond c) {
  switch (c) {
    case Cond::Ceq:
      return Cond::Cne;
    case Cond::Cne:
      return Cond::Ceq;
    case Cond::Clt:
      return Cond::Cge;
    case Cond::Cle:
      return Cond::Cgt;
    case Cond::Cgt:
      return Cond::Cle;
    case Cond::Cge:
      return Cond::Clt;
    case Cond::Cltu:
      return Cond::Cgeu;
    case Cond::Cleu:
      return Cond::Cgtu;
    case Cond::Cgtu:
      return Cond::Cleu;
    case Cond::Cgeu:
      return Cond::Cltu;
  }
  throw IrError("bad cond");
}

bool cond_is_signed_order(Cond c) {
  return c == Cond::Clt || c == Cond::Cle || c == Cond::Cgt || c == Cond::Cge;
}

const char* to_string(SlotKind k) {
  return kSlotKindNames[static_cast<int>(k)];
}

std::optional<SlotKind> slot_kind_from(const std::string& name) {
  for (size_t i = 0; i < kSlotKindNames.size(); ++i)
    if (name == kSlotKindNames[i]) return static_cast<SlotKind>(i);
  return std::nullopt;
}

std::string OpCode::render() const {
  std::string s = name;
  if (cond) {
    s += "(";
    s += to_string(*cond);
    s += ")";
  }
  if (imm) {
    s += "(" + std::to_string(*imm) + ")";
  }
  return s;
}

int Addressing::arg_count() const {
  switch (kind) {
    case Kind::Indexed:
      return 1;
    case Kind::Indexed2Scaled:
      return 2;
    case Kind::Global:
    case Kind::Stack:
      return 0;
  }
  return 0;
}

std::string Addressing::render() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Indexed:
      os << "Aindexed(" << disp << ")";
      break;
    case Kind::Indexed2Scaled:
      os << "Aindexed2scaled(" << scale << ", " << disp << ")";
      break;
    case Kind::Global:
      os << "Aglobal(" << symbol << ", " << disp << ")";
      break;
    case Kind::Stack:
      os << "Ainstack(" << disp << ")";
      break;
  }
  return os.str();
}

// ---- expression constructors -------------------------------------------------

ExprPtr Expr::constant(int64_t v, TypeRef ty) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Const;
  e->value = v;
  e->ty = std::move(ty);
  return e;
}

ExprPtr Expr::variable(Pseudo p, TypeRef ty) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->var = p;
  e->ty = std::move(ty);
  return e;
}

ExprPtr Expr::unop(OpCode op, ExprPtr a, TypeRef ty) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Unop;
  e->op = std::move(op);
  e->a = std::move(a);
  e->ty = std::move(ty);
  return e;
}

ExprPtr Expr::binop(OpCode op, ExprPtr a, ExprPtr b, TypeRef ty) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Binop;
  e->op = std::move(op);
  e->a = std::move(a);
  e->b = std::move(b);
  e->ty = std::move(ty);
  return e;
}

ExprPtr Expr::load(Chunk c, ExprPtr addr, TypeRef ty) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Load;
  e->chunk = c;
  e->a = std::move(addr);
  e->ty = std::move(ty);
  return e;
}

ExprPtr Expr::member(ExprPtr base, std::string name, TypeRef ty) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Field;
  e->field = std::move(name);
  e->a = std::move(base);
  e->ty = std::move(ty);
  return e;
}

ExprPtr Expr::symbol(std::string name, TypeRef ty) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Sym;
  e->sym = std::move(name);
  e->ty = std::move(ty);
  return e;
}

bool expr_fully_typed(const ExprPtr& e) {
  if (!e) return true;
  if (!e->ty) return false;
  return expr_fully_typed(e->a) && expr_fully_typed(e->b);
}

void collect_vars(const ExprPtr& e, std::vector<Pseudo>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Var) out.push_back(e->var);
  collect_vars(e->a, out);
  collect_vars(e->b, out);
}

// ---- renders -------------------------------------------------------------

namespace {

std::string render_node(NodeId n) {
  std::ostringstream os;
  if (n.is_synthetic())
    os << "@syn" << n.syn_index();
  else
    os << "@" << std::hex << n.value;
  return os.str();
}

template <class R>
std::string render_reg_list(const std::vector<R>& regs) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < regs.size(); ++i) {
    if (i) os << ", ";
    if constexpr (std::is_same_v<R, MachReg>)
      os << to_string(regs[i]);
    else
      os << "p" << regs[i];
  }
  os << "]";
  return os.str();
}

std::string render_stack_ofs(StackBase base, int64_t ofs) {
  if (base == StackBase::SP) return "sp:" + std::to_string(ofs);
  return std::to_string(ofs);
}

std::string render_opt_imm(const std::optional<int64_t>& imm) {
  return imm ? std::to_string(*imm) : "_";
}

std::string render_expr(const ExprPtr& e) {
  if (!e) return "_";
  std::ostringstream os;
  switch (e->kind) {
    case Expr::Kind::Const:
      os << e->value;
      break;
    case Expr::Kind::Var:
      os << "v" << e->var;
      break;
    case Expr::Kind::Sym:
      os << "&" << e->sym;
      break;
    case Expr::Kind::Unop:
      os << e->op.render() << "(" << render_expr(e->a) << ")";
      break;
    case Expr::Kind::Binop:
      os << e->op.render() << "(" << render_expr(e->a) << ", "
         << render_expr(e->b) << ")";
      break;
    case Expr::Kind::Load:
      os << "Eload(" << to_string(e->chunk) << ", " << render_expr(e->a) << ")";
      break;
    case Expr::Kind::Field:
      os << "Efield(" << render_expr(e->a) << ", " << e->field << ")";
      break;
  }
  if (e->ty) os << ":" << e->ty->text;
  return os.str();
}

std::string render_asm_operand(const AsmOperand& op) {
  std::ostringstream os;
  switch (op.kind) {
    case AsmOperand::Kind::Reg:
      os << "reg(" << op.reg << ", " << op.width << ")";
      break;
    case AsmOperand::Kind::Imm:
      os << "imm(" << op.imm << ")";
      break;
    case AsmOperand::Kind::Mem:
      if (!op.sym.empty()) {
        os << "smem(" << op.sym << ", " << op.imm << ")";
      } else {
        os << "mem(" << (op.base.empty() ? "_" : op.base) << ", "
           << (op.index.empty() ? "_" : op.index) << ", " << op.scale << ", "
           << op.imm << ")";
      }
      break;
    case AsmOperand::Kind::Sym:
      os << "sym(" << op.sym << ")";
      break;
  }
  return os.str();
}

}  // namespace

std::string render_stmt(IrLevel, const AsmInst& s) {
  std::ostringstream os;
  os << "Araw(" << s.mnemonic << ", [";
  for (size_t i = 0; i < s.operands.size(); ++i) {
    if (i) os << ", ";
    os << render_asm_operand(s.operands[i]);
  }
  os << "])";
  return os.str();
}

std::string render_stmt(IrLevel, const MachInst& s) {
  std::ostringstream os;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Msetstack>) {
          os << "Msetstack(" << to_string(n.src) << ", "
             << render_stack_ofs(n.base, n.ofs) << ", " << to_string(n.ty)
             << ")";
        } else if constexpr (std::is_same_v<T, Mgetstack>) {
          os << "Mgetstack(" << render_stack_ofs(n.base, n.ofs) << ", "
             << to_string(n.ty) << ", " << to_string(n.dst) << ")";
        } else if constexpr (std::is_same_v<T, Mload>) {
          os << "Mload(" << to_string(n.chunk) << ", " << n.addr.render()
             << ", " << render_reg_list(n.args) << ", " << to_string(n.dst)
             << ")";
        } else if constexpr (std::is_same_v<T, Mstore>) {
          os << "Mstore(" << to_string(n.chunk) << ", " << n.addr.render()
             << ", " << render_reg_list(n.args) << ", " << to_string(n.src)
             << ")";
        } else if constexpr (std::is_same_v<T, Mop>) {
          os << "Mop(" << n.op.render() << ", " << render_reg_list(n.args)
             << ", " << to_string(n.dst) << ")";
        } else if constexpr (std::is_same_v<T, Mcall>) {
          os << "Mcall(" << n.target << ")";
        } else if constexpr (std::is_same_v<T, Mcond>) {
          os << "Mcond(" << to_string(n.cond) << ", " << n.width << ", "
             << render_reg_list(n.args) << ", " << render_opt_imm(n.imm)
             << ", " << render_node(n.iftrue) << ", " << render_node(n.iffalse)
             << ")";
        } else if constexpr (std::is_same_v<T, Mreturn>) {
          os << "Mreturn";
        } else if constexpr (std::is_same_v<T, Mbuiltin>) {
          os << "Mbuiltin(" << n.name << ", " << render_reg_list(n.args)
             << ", " << (n.dst ? to_string(*n.dst) : "_") << ")";
        }
      },
      s);
  return os.str();
}

std::string render_stmt(IrLevel, const LtlInst& s) {
  std::ostringstream os;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Lgetstack>) {
          os << "Lgetstack(" << to_string(n.slot) << ", " << n.ofs << ", "
             << to_string(n.ty) << ", " << to_string(n.dst) << ")";
        } else if constexpr (std::is_same_v<T, Lsetstack>) {
          os << "Lsetstack(" << to_string(n.src) << ", " << to_string(n.slot)
             << ", " << n.ofs << ", " << to_string(n.ty) << ")";
        } else if constexpr (std::is_same_v<T, Lop>) {
          os << "Lop(" << n.op.render() << ", " << render_reg_list(n.args)
             << ", " << to_string(n.dst) << ")";
        } else if constexpr (std::is_same_v<T, Lload>) {
          os << "Lload(" << to_string(n.chunk) << ", " << n.addr.render()
             << ", " << render_reg_list(n.args) << ", " << to_string(n.dst)
             << ")";
        } else if constexpr (std::is_same_v<T, Lstore>) {
          os << "Lstore(" << to_string(n.chunk) << ", " << n.addr.render()
             << ", " << render_reg_list(n.args) << ", " << to_string(n.src)
             << ")";
        } else if constexpr (std::is_same_v<T, Lcall>) {
          os << "Lcall(" << n.target << ")";
        } else if constexpr (std::is_same_v<T, Lcond>) {
          os << "Lcond(" << to_string(n.cond) << ", " << n.width << ", "
             << render_reg_list(n.args) << ", " << render_opt_imm(n.imm)
             << ", " << render_node(n.iftrue) << ", " << render_node(n.iffalse)
             << ")";
        } else if constexpr (std::is_same_v<T, Lreturn>) {
          os << "Lreturn";
        } else if constexpr (std::is_same_v<T, Lbuiltin>) {
          os << "Lbuiltin(" << n.name << ", " << render_reg_list(n.args)
             << ", " << (n.dst ? to_string(*n.dst) : "_") << ")";
        }
      },
      s);
  return os.str();
}

std::string render_stmt(IrLevel, const RtlInst& s) {
  std::ostringstream os;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Iop>) {
          os << "Iop(" << n.op.render() << ", " << render_reg_list(n.args)
             << ", p" << n.dst << ")";
        } else if constexpr (std::is_same_v<T, Iload>) {
          os << "Iload(" << to_string(n.chunk) << ", " << n.addr.render()
             << ", " << render_reg_list(n.args) << ", p" << n.dst << ")";
        } else if constexpr (std::is_same_v<T, Istore>) {
          os << "Istore(" << to_string(n.chunk) << ", " << n.addr.render()
             << ", " << render_reg_list(n.args) << ", p" << n.src << ")";
        } else if constexpr (std::is_same_v<T, Icall>) {
          os << "Icall(" << n.target << ", " << render_reg_list(n.args) << ", "
             << (n.dst ? "p" + std::to_string(*n.dst) : "_") << ")";
        } else if constexpr (std::is_same_v<T, Icond>) {
          os << "Icond(" << to_string(n.cond) << ", " << n.width << ", "
             << render_reg_list(n.args) << ", " << render_opt_imm(n.imm)
             << ", " << render_node(n.iftrue) << ", " << render_node(n.iffalse)
             << ")";
        } else if constexpr (std::is_same_v<T, Ireturn>) {
          os << "Ireturn(" << (n.value ? "p" + std::to_string(*n.value) : "_")
             << ")";
        } else if constexpr (std::is_same_v<T, Ibuiltin>) {
          os << "Ibuiltin(" << n.name << ", " << render_reg_list(n.args)
             << ", " << (n.dst ? "p" + std::to_string(*n.dst) : "_") << ")";
        }
      },
      s);
  return os.str();
}

std::string render_stmt(IrLevel, const Stmt& s) {
  std::ostringstream os;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Sset>) {
          os << "Sset(v" << n.dst;
          if (n.dst_ty) os << ":" << n.dst_ty->text;
          os << ", " << render_expr(n.e) << ")";
        } else if constexpr (std::is_same_v<T, Sstore>) {
          os << "Sstore(" << to_string(n.chunk) << ", " << render_expr(n.addr)
             << ", " << render_expr(n.val) << ")";
        } else if constexpr (std::is_same_v<T, Scall>) {
          os << "Scall(";
          if (n.dst) {
            os << "v" << *n.dst;
            if (n.dst_ty) os << ":" << n.dst_ty->text;
          } else {
            os << "_";
          }
          os << ", " << n.target << ", [";
          for (size_t i = 0; i < n.args.size(); ++i) {
            if (i) os << ", ";
            os << render_expr(n.args[i]);
          }
          os << "])";
        } else if constexpr (std::is_same_v<T, Sifthenelse>) {
          os << "Sifthenelse(" << render_expr(n.cond) << ", "
             << render_node(n.then_node) << ", " << render_node(n.else_node)
             << ")";
        } else if constexpr (std::is_same_v<T, Sloop>) {
          os << "Sloop(" << render_node(n.body) << ")";
        } else if constexpr (std::is_same_v<T, Sblock>) {
          os << "Sblock(" << render_node(n.body) << ")";
        } else if constexpr (std::is_same_v<T, Sexit>) {
          os << "Sexit(" << n.depth << ")";
        } else if constexpr (std::is_same_v<T, Sreturn>) {
          os << "Sreturn(" << (n.e ? render_expr(n.e) : "_") << ")";
        } else if constexpr (std::is_same_v<T, Sgoto>) {
          os << "Sgoto(" << render_node(n.target) << ")";
        } else if constexpr (std::is_same_v<T, Sskip>) {
          os << "Sskip";
        }
      },
      s);
  return os.str();
}

namespace {

template <class T>
Value box(IrLevel level, T s) {
  auto b = std::make_shared<StmtBox>();
  b->level = level;
  b->text = render_stmt(level, s);
  b->payload = std::make_shared<StmtPayloadOf<T>>(std::move(s));
  return Value::stmt(std::move(b));
}

}  // namespace

Value make_stmt(IrLevel level, AsmInst s) { return box(level, std::move(s)); }
Value make_stmt(IrLevel level, MachInst s) { return box(level, std::move(s)); }
Value make_stmt(IrLevel level, LtlInst s) { return box(level, std::move(s)); }
Value make_stmt(IrLevel level, RtlInst s) { return box(level, std::move(s)); }
Value make_stmt(IrLevel level, Stmt s) { return box(level, std::move(s)); }

std::string principal_relation(IrLevel level) {
  switch (level) {
    case IrLevel::X86Asm:
      return "instr";
    case IrLevel::Mach:
      return "mach_inst";
    case IrLevel::Ltl:
      return "ltl_inst";
    case IrLevel::Rtl:
      return "rtl_inst";
    case IrLevel::Cminor:
      return "cminor_stmt";
    case IrLevel::Csharpminor:
      return "csh_stmt";
    case IrLevel::Clight:
      return "clight_stmt";
  }
  throw IrError("bad level");
}

std::string edge_relation(IrLevel level) {
  switch (level) {
    case IrLevel::X86Asm:
      return "asm_succ";
    case IrLevel::Mach:
      return "mach_succ";
    case IrLevel::Ltl:
      return "ltl_succ";
    case IrLevel::Rtl:
      return "rtl_succ";
    case IrLevel::Cminor:
      return "cminor_succ";
    case IrLevel::Csharpminor:
      return "csh_succ";
    case IrLevel::Clight:
      return "clight_succ";
  }
  throw IrError("bad level");
}

}  // namespace reclift
