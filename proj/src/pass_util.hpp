#pragma once

// Internal helpers shared by the pass implementations.

#include <map>
#include <set>

#include "reclift/frontend.hpp"
#include "reclift/passes.hpp"

namespace reclift::detail {

struct FuncView {
  std::string name;
  NodeId entry;
  std::vector<std::pair<NodeId, AsmInst>> lines;  // address order
};

// Functions with their instruction lines, ordered by entry address.
std::vector<FuncView> function_views(const Store& store);

inline Value vnode(NodeId n) { return Value::node(n); }
inline Value vatom(std::string s) { return Value::atom(std::move(s)); }
inline Value vint(int64_t i) { return Value::integer(i); }

inline std::string stem_of(const AsmInst& a) {
  return classify_mnemonic(a.mnemonic).stem;
}

inline bool is_stem(const AsmInst& a, const char* stem) {
  return stem_of(a) == stem;
}

inline bool is_reg(const AsmOperand& op) {
  return op.kind == AsmOperand::Kind::Reg;
}
inline bool is_imm(const AsmOperand& op) {
  return op.kind == AsmOperand::Kind::Imm;
}
inline bool is_mem(const AsmOperand& op) {
  return op.kind == AsmOperand::Kind::Mem;
}
// Frame-register operands never act as data.
inline bool is_frame_reg_name(const std::string& name) {
  auto info = platform_reg(name);
  if (!info) return false;
  return info->reg == MachReg::BP || info->reg == MachReg::SP;
}
inline bool is_data_reg(const AsmOperand& op) {
  return is_reg(op) && !is_frame_reg_name(op.reg);
}
inline bool is_stack_mem(const AsmOperand& op) {
  return is_mem(op) && op.sym.empty() && op.index.empty() &&
         is_frame_reg_name(op.base);
}
inline bool is_data_mem(const AsmOperand& op) {
  return is_mem(op) && !is_stack_mem(op);
}

inline MachReg reg_of(const AsmOperand& op) {
  auto info = platform_reg(op.reg);
  if (!info) throw IrError("unmapped register " + op.reg);
  return info->reg;
}

// Chunk for a load/store of the given instruction.
inline Chunk access_chunk(const AsmInst& a) {
  auto stem = stem_of(a);
  if (stem == "movss") return Chunk::MFloat32;
  if (stem == "movsd") return Chunk::MFloat64;
  if (stem == "movzbl" || stem == "movzbw" || stem == "movzbq")
    return Chunk::MInt8u;
  if (stem == "movsbl" || stem == "movsbw" || stem == "movsbq")
    return Chunk::MInt8s;
  if (stem == "movzwl" || stem == "movzwq") return Chunk::MInt16u;
  if (stem == "movswl" || stem == "movswq") return Chunk::MInt16s;
  if (stem == "movslq") return Chunk::MInt32;
  switch (op_width(a)) {
    case 8:
      return Chunk::MInt8u;
    case 16:
      return Chunk::MInt16u;
    case 64:
      return Chunk::MInt64;
    default:
      return Chunk::MInt32;
  }
}

// Machine type for a stack slot access.
inline MachTy slot_store_ty(const AsmInst& a) {
  auto stem = stem_of(a);
  if (stem == "movss") return MachTy::Tsingle;
  if (stem == "movsd") return MachTy::Tfloat;
  return op_width(a) == 64 ? MachTy::Tany64 : MachTy::Tint;
}
inline MachTy slot_load_ty(const AsmInst& a) {
  auto stem = stem_of(a);
  if (stem == "movss") return MachTy::Tsingle;
  if (stem == "movsd") return MachTy::Tfloat;
  return op_width(a) == 64 ? MachTy::Tlong : MachTy::Tint;
}

// Addressing mode plus argument registers for a non-stack memory operand.
inline std::pair<Addressing, std::vector<MachReg>> memory_addressing(
    const AsmOperand& op) {
  if (!op.sym.empty()) return {Addressing::global(op.sym, op.imm), {}};
  std::vector<MachReg> args;
  if (!op.index.empty()) {
    args.push_back(reg_of(AsmOperand{AsmOperand::Kind::Reg, op.base, 0, 0, "",
                                     "", 1, ""}));
    args.push_back(reg_of(AsmOperand{AsmOperand::Kind::Reg, op.index, 0, 0,
                                     "", "", 1, ""}));
    return {Addressing::indexed2(op.scale, op.imm), args};
  }
  args.push_back(
      reg_of(AsmOperand{AsmOperand::Kind::Reg, op.base, 0, 0, "", "", 1, ""}));
  return {Addressing::indexed(op.imm), args};
}

// Flag-writing classification for cmp/test/arithmetic fusion.
inline bool writes_flags(const AsmInst& a) {
  static const std::set<std::string> flagger = {
      "cmp", "test", "add", "sub", "and", "or",
      "xor", "neg",  "imul", "shl", "shr", "sar"};
  return flagger.count(stem_of(a)) > 0;
}

// The comparison a jcc/setcc observes, given its flag-writing source:
//   cmp b,a   -> a ? b        test r,r -> r ? 0
//   arith dst -> dst ? 0
struct FlagCompare {
  std::vector<MachReg> args;
  std::optional<int64_t> imm;
  int width = 32;
  bool ok = false;
};

inline FlagCompare flag_compare(const AsmInst& writer) {
  FlagCompare fc;
  fc.width = op_width(writer);
  auto stem = stem_of(writer);
  const auto& ops = writer.operands;
  if (stem == "cmp" && ops.size() == 2) {
    // AT&T: cmp src,dst compares dst against src.
    if (is_data_reg(ops[1]) && is_data_reg(ops[0])) {
      fc.args = {reg_of(ops[1]), reg_of(ops[0])};
      fc.ok = true;
    } else if (is_data_reg(ops[1]) && is_imm(ops[0])) {
      fc.args = {reg_of(ops[1])};
      fc.imm = ops[0].imm;
      fc.ok = true;
    }
    return fc;
  }
  if (stem == "test" && ops.size() == 2 && is_data_reg(ops[0]) &&
      is_data_reg(ops[1]) && ops[0].reg == ops[1].reg) {
    fc.args = {reg_of(ops[0])};
    fc.imm = 0;
    fc.ok = true;
    return fc;
  }
  // Arithmetic writers: condition is the destination against zero.
  if ((stem == "add" || stem == "sub" || stem == "and" || stem == "or" ||
       stem == "xor" || stem == "neg" || stem == "imul" || stem == "shl" ||
       stem == "shr" || stem == "sar") &&
      !ops.empty() && is_data_reg(ops.back())) {
    fc.args = {reg_of(ops.back())};
    fc.imm = 0;
    fc.ok = true;
  }
  return fc;
}

}  // namespace reclift::detail
