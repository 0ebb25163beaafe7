#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "reclift/value.hpp"

namespace reclift {

struct IrError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// CompCert-style machine types carried by stack slot accesses.
enum class MachTy { Tint, Tlong, Tsingle, Tfloat, Tany32, Tany64 };
const char* to_string(MachTy t);
std::optional<MachTy> mach_ty_from(const std::string& name);
MachTy chunk_mach_ty(Chunk c);

// Comparison conditions; the u-suffixed forms are unsigned.
enum class Cond { Ceq, Cne, Clt, Cle, Cgt, Cge, Cltu, Cleu, Cgtu, Cgeu };
const char* to_string(Cond c);
std::optional<Cond> cond_from(const std::string& name);
Cond negate(Cond c);
bool cond_is_signed_order(Cond c);  // true for Clt/Cle/Cgt/Cge

// Operation code: a name plus an optional immediate and an optional
// condition, rendered as Oaddl, Oaddl(4), or Ocmp(Cle).
struct OpCode {
  std::string name;
  std::optional<int64_t> imm;
  std::optional<Cond> cond;

  static OpCode simple(std::string n) { return {std::move(n), {}, {}}; }
  static OpCode with_imm(std::string n, int64_t v) {
    return {std::move(n), v, {}};
  }
  static OpCode with_cond(std::string n, Cond c) {
    return {std::move(n), {}, c};
  }
  std::string render() const;
};

struct Addressing {
  enum class Kind { Indexed, Indexed2Scaled, Global, Stack };
  Kind kind = Kind::Indexed;
  int64_t disp = 0;
  int scale = 1;        // Indexed2Scaled
  std::string symbol;   // Global

  static Addressing indexed(int64_t disp) {
    return {Kind::Indexed, disp, 1, {}};
  }
  static Addressing indexed2(int scale, int64_t disp) {
    return {Kind::Indexed2Scaled, disp, scale, {}};
  }
  static Addressing global(std::string sym, int64_t disp = 0) {
    return {Kind::Global, disp, 1, std::move(sym)};
  }
  static Addressing stack(int64_t ofs) { return {Kind::Stack, ofs, 1, {}}; }
  int arg_count() const;
  std::string render() const;
};

// ---- x86Asm level: raw listing instructions --------------------------------

struct AsmOperand {
  enum class Kind { Reg, Imm, Mem, Sym };
  Kind kind = Kind::Imm;
  std::string reg;    // platform register name, e.g. "rdi"
  int width = 0;      // register width in bits
  int64_t imm = 0;    // Imm value or Mem displacement
  std::string base;   // Mem base register ("" if absent)
  std::string index;  // Mem index register ("" if absent)
  int scale = 1;
  std::string sym;    // Sym name; Mem with rip base also sets sym
};

struct AsmInst {
  std::string mnemonic;
  std::vector<AsmOperand> operands;
};

// ---- Mach level -------------------------------------------------------------

enum class StackBase { BP, SP };

struct Msetstack {
  MachReg src;
  StackBase base = StackBase::BP;
  int64_t ofs = 0;
  MachTy ty = MachTy::Tany64;
};
struct Mgetstack {
  StackBase base = StackBase::BP;
  int64_t ofs = 0;
  MachTy ty = MachTy::Tany64;
  MachReg dst;
};
struct Mload {
  Chunk chunk;
  Addressing addr;
  std::vector<MachReg> args;
  MachReg dst;
};
struct Mstore {
  Chunk chunk;
  Addressing addr;
  std::vector<MachReg> args;
  MachReg src;
};
struct Mop {
  OpCode op;
  std::vector<MachReg> args;
  MachReg dst;
};
struct Mcall {
  std::string target;
};
struct Mcond {
  Cond cond;
  int width = 32;
  std::vector<MachReg> args;
  std::optional<int64_t> imm;
  NodeId iftrue, iffalse;
};
struct Mreturn {};
struct Mbuiltin {
  std::string name;
  std::vector<MachReg> args;
  std::optional<MachReg> dst;
};
using MachInst = std::variant<Msetstack, Mgetstack, Mload, Mstore, Mop, Mcall,
                              Mcond, Mreturn, Mbuiltin>;

// ---- LTL level --------------------------------------------------------------

enum class SlotKind { Local, Incoming, Outgoing };
const char* to_string(SlotKind k);
std::optional<SlotKind> slot_kind_from(const std::string& name);

struct Lgetstack {
  SlotKind slot;
  int64_t ofs = 0;
  MachTy ty = MachTy::Tany64;
  MachReg dst;
};
struct Lsetstack {
  MachReg src;
  SlotKind slot;
  int64_t ofs = 0;
  MachTy ty = MachTy::Tany64;
};
struct Lop {
  OpCode op;
  std::vector<MachReg> args;
  MachReg dst;
};
struct Lload {
  Chunk chunk;
  Addressing addr;
  std::vector<MachReg> args;
  MachReg dst;
};
struct Lstore {
  Chunk chunk;
  Addressing addr;
  std::vector<MachReg> args;
  MachReg src;
};
struct Lcall {
  std::string target;
};
struct Lcond {
  Cond cond;
  int width = 32;
  std::vector<MachReg> args;
  std::optional<int64_t> imm;
  NodeId iftrue, iffalse;
};
struct Lreturn {};
struct Lbuiltin {
  std::string name;
  std::vector<MachReg> args;
  std::optional<MachReg> dst;
};
using LtlInst = std::variant<Lgetstack, Lsetstack, Lop, Lload, Lstore, Lcall,
                             Lcond, Lreturn, Lbuiltin>;

// ---- RTL level --------------------------------------------------------------

using Pseudo = uint32_t;

struct Iop {
  OpCode op;
  std::vector<Pseudo> args;
  Pseudo dst;
};
struct Iload {
  Chunk chunk;
  Addressing addr;
  std::vector<Pseudo> args;
  Pseudo dst;
};
struct Istore {
  Chunk chunk;
  Addressing addr;
  std::vector<Pseudo> args;
  Pseudo src;
};
struct Icall {
  std::string target;
  std::vector<Pseudo> args;
  std::optional<Pseudo> dst;
};
struct Icond {
  Cond cond;
  int width = 32;
  std::vector<Pseudo> args;
  std::optional<int64_t> imm;
  NodeId iftrue, iffalse;
};
struct Ireturn {
  std::optional<Pseudo> value;
};
struct Ibuiltin {
  std::string name;
  std::vector<Pseudo> args;
  std::optional<Pseudo> dst;
};
using RtlInst = std::variant<Iop, Iload, Istore, Icall, Icond, Ireturn,
                             Ibuiltin>;

// ---- Cminor / Csharpminor / Clight ------------------------------------------
// One statement datatype serves the top three levels; the store's level tag
// distinguishes them. At Clight every expression node carries a type.

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { Const, Var, Unop, Binop, Load, Field, Sym };
  Kind kind = Kind::Const;
  int64_t value = 0;     // Const
  Pseudo var = 0;        // Var
  OpCode op;             // Unop / Binop
  Chunk chunk = Chunk::MInt32;  // Load
  std::string field;     // Field name "ofs_N"
  std::string sym;       // Sym: address of a global
  ExprPtr a, b;
  TypeRef ty;            // null until Clight

  static ExprPtr constant(int64_t v, TypeRef ty = nullptr);
  static ExprPtr variable(Pseudo p, TypeRef ty = nullptr);
  static ExprPtr unop(OpCode op, ExprPtr e, TypeRef ty = nullptr);
  static ExprPtr binop(OpCode op, ExprPtr a, ExprPtr b, TypeRef ty = nullptr);
  static ExprPtr load(Chunk c, ExprPtr addr, TypeRef ty = nullptr);
  static ExprPtr member(ExprPtr base, std::string name, TypeRef ty = nullptr);
  static ExprPtr symbol(std::string name, TypeRef ty = nullptr);
};

bool expr_fully_typed(const ExprPtr& e);
void collect_vars(const ExprPtr& e, std::vector<Pseudo>& out);

struct Sset {
  Pseudo dst;
  ExprPtr e;
  TypeRef dst_ty;  // null until Clight
};
struct Sstore {
  Chunk chunk;
  ExprPtr addr;
  ExprPtr val;
};
struct Scall {
  std::optional<Pseudo> dst;
  TypeRef dst_ty;  // null until Clight
  std::string target;
  std::vector<ExprPtr> args;
};
struct Sifthenelse {
  ExprPtr cond;
  NodeId then_node, else_node;
};
struct Sloop {
  NodeId body;
};
struct Sblock {
  NodeId body;
};
struct Sexit {
  int depth = 0;
};
struct Sreturn {
  ExprPtr e;  // may be null
};
struct Sgoto {
  NodeId target;
};
struct Sskip {};
using Stmt = std::variant<Sset, Sstore, Scall, Sifthenelse, Sloop, Sblock,
                          Sexit, Sreturn, Sgoto, Sskip>;

// ---- boxing and text ---------------------------------------------------------

Value make_stmt(IrLevel level, AsmInst s);
Value make_stmt(IrLevel level, MachInst s);
Value make_stmt(IrLevel level, LtlInst s);
Value make_stmt(IrLevel level, RtlInst s);
Value make_stmt(IrLevel level, Stmt s);

std::string render_stmt(IrLevel level, const AsmInst& s);
std::string render_stmt(IrLevel level, const MachInst& s);
std::string render_stmt(IrLevel level, const LtlInst& s);
std::string render_stmt(IrLevel level, const RtlInst& s);
std::string render_stmt(IrLevel level, const Stmt& s);

// Parses a canonical statement text back at the given level; types are
// re-interned through the table.
Value parse_stmt(IrLevel level, const std::string& text, CTypeTable& types);

// Parses a value in the dump syntax. Statement columns need the level; tuple
// elements self-describe.
Value parse_value(const std::string& text, ValueTag tag,
                  std::optional<IrLevel> stmt_level, CTypeTable& types);

inline const MachInst* as_mach(const Value& v) {
  return stmt_as<MachInst>(v.as_stmt());
}
inline const LtlInst* as_ltl(const Value& v) {
  return stmt_as<LtlInst>(v.as_stmt());
}
inline const RtlInst* as_rtl(const Value& v) {
  return stmt_as<RtlInst>(v.as_stmt());
}
inline const Stmt* as_stmt_node(const Value& v) {
  return stmt_as<Stmt>(v.as_stmt());
}
inline const AsmInst* as_asm(const Value& v) {
  return stmt_as<AsmInst>(v.as_stmt());
}

// Per-level relation names.
std::string principal_relation(IrLevel level);
std::string edge_relation(IrLevel level);

}  // namespace reclift
