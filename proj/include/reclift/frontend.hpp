#pragma once

#include <string>
#include <vector>

#include "reclift/ir.hpp"
#include "reclift/store.hpp"

namespace reclift {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One parsed listing line. The mnemonic keeps its written form (including
// AT&T size suffixes); classification helpers below normalize it.
struct ListingLine {
  uint64_t address = 0;
  std::string mnemonic;
  std::vector<AsmOperand> operands;
  std::string raw;
};

struct FunctionBlock {
  std::string name;
  uint64_t entry = 0;
  std::vector<ListingLine> lines;
};

struct FrontendDiagnostic {
  uint64_t address = 0;
  std::string category;  // unsupported-mnemonic | ignored-mnemonic |
                         // non-monotone-address | dangling-jump
  std::string message;
};

// Parses a textual disassembly listing:
//   <fn NAME 0xADDR>
//   HEXADDR: MNEMONIC[ OPERANDS]   # comment
// AT&T operand syntax, comma separated; a blank line ends a block.
std::vector<FunctionBlock> parse_listing(const std::string& text);

// Canonical re-rendering of parsed blocks; parse(render(blocks)) == blocks.
std::string render_listing(const std::vector<FunctionBlock>& blocks);

// Non-fatal lint: unsupported mnemonics, non-monotone addresses, jumps that
// leave every known block.
std::vector<FrontendDiagnostic> validate(
    const std::vector<FunctionBlock>& blocks);

// Populates the extensional store: instr facts (one token per line),
// instr_next, func, func_instr and the platform register map.
void to_edb(const std::vector<FunctionBlock>& blocks, Store& store);

// ---- mnemonic and register classification ------------------------------------

struct RegInfo {
  MachReg reg;
  int width = 0;  // bits
};
std::optional<RegInfo> platform_reg(const std::string& name);

// Written form -> canonical stem ("movl" -> "mov", "cltd" -> "cdq") plus the
// operand width implied by the suffix (0 when none).
struct MnemonicInfo {
  std::string stem;
  int suffix_width = 0;  // bits, 0 if no suffix
  bool supported = false;
  bool ignored = false;  // endbr64, nop
};
MnemonicInfo classify_mnemonic(const std::string& written);

// Operand width in bits for an instruction: suffix first, then register
// operands, 32 as a last resort. movss/movsd yield 32/64.
int op_width(const AsmInst& inst);

bool is_jcc(const std::string& stem);
bool is_setcc(const std::string& stem);
// Condition encoded by a jcc/setcc stem ("jle" -> Cle, "seta" -> Cgtu); js
// and jns map onto signed < 0 and >= 0 against an implicit zero.
Cond cc_condition(const std::string& stem);

}  // namespace reclift
