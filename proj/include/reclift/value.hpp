#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "reclift/ctypes.hpp"

namespace reclift {

struct ValueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Program points. Values below 2^63 are concrete instruction addresses;
// values at or above are synthetic nodes allocated by the store.
struct NodeId {
  static constexpr uint64_t kSynBase = uint64_t{1} << 63;

  uint64_t value = 0;

  static NodeId addr(uint64_t a) { return {a}; }
  static NodeId synthetic(uint64_t index) { return {kSynBase + index}; }
  bool is_synthetic() const { return value >= kSynBase; }
  uint64_t syn_index() const { return value - kSynBase; }

  friend bool operator==(NodeId, NodeId) = default;
  friend auto operator<=>(NodeId, NodeId) = default;
};

enum class IrLevel { X86Asm, Mach, Ltl, Rtl, Cminor, Csharpminor, Clight };
constexpr int kIrLevelCount = 7;
const char* to_string(IrLevel level);
std::optional<IrLevel> ir_level_from(const std::string& name);

enum class MachReg : uint8_t {
  AX, BX, CX, DX, SI, DI, BP, SP,
  R8, R9, R10, R11, R12, R13, R14, R15,
  X0, X1, X2, X3, X4, X5, X6, X7,
  X8, X9, X10, X11, X12, X13, X14, X15,
};
constexpr int kMachRegCount = 32;
const char* to_string(MachReg r);
std::optional<MachReg> mach_reg_from(const std::string& name);
inline bool is_float_reg(MachReg r) { return r >= MachReg::X0; }

enum class Chunk : uint8_t {
  MInt8s, MInt8u, MInt16s, MInt16u, MInt32, MInt64,
  MFloat32, MFloat64, Many64,
};
const char* to_string(Chunk c);
std::optional<Chunk> chunk_from(const std::string& name);
int chunk_size(Chunk c);
bool chunk_signed(Chunk c);  // false for unsigned/float/opaque
bool chunk_is_float(Chunk c);

// Type-erased IR statement. The canonical text is the statement's identity:
// equality, ordering and hashing all go through (level, text).
class StmtPayload {
 public:
  virtual ~StmtPayload() = default;
};

template <class T>
class StmtPayloadOf final : public StmtPayload {
 public:
  explicit StmtPayloadOf(T node) : node(std::move(node)) {}
  T node;
};

struct StmtBox {
  IrLevel level = IrLevel::X86Asm;
  std::string text;
  std::shared_ptr<const StmtPayload> payload;
};

using StmtRef = std::shared_ptr<const StmtBox>;

template <class T>
const T* stmt_as(const StmtRef& s) {
  if (!s) return nullptr;
  auto* p = dynamic_cast<const StmtPayloadOf<T>*>(s->payload.get());
  return p ? &p->node : nullptr;
}

enum class ValueTag { Node, Int, Reg, Chunk, Type, Atom, Stmt, Tuple };
const char* to_string(ValueTag tag);

class Value;
using TupleRef = std::shared_ptr<const std::vector<Value>>;

// One column value: the tagged union stored in relations. Structural
// equality, ordering, and hashing; immutable and cheap to copy.
class Value {
 public:
  Value() : v_(int64_t{0}) {}

  static Value node(NodeId n) { return Value(n); }
  static Value integer(int64_t i) { return Value(i); }
  static Value reg(MachReg r) { return Value(r); }
  static Value chunk(Chunk c) { return Value(c); }
  static Value type(TypeRef t);
  static Value atom(std::string s) { return Value(std::move(s)); }
  static Value stmt(StmtRef s);
  static Value tuple(std::vector<Value> vs) {
    return Value(std::make_shared<const std::vector<Value>>(std::move(vs)));
  }

  ValueTag tag() const;
  NodeId as_node() const;
  int64_t as_int() const;
  MachReg as_reg() const;
  Chunk as_chunk() const;
  const TypeRef& as_type() const;
  const std::string& as_atom() const;
  const StmtRef& as_stmt() const;
  const std::vector<Value>& as_tuple() const;

  bool operator==(const Value& o) const;
  bool operator<(const Value& o) const;
  size_t hash() const;

 private:
  template <class T>
  explicit Value(T v) : v_(std::move(v)) {}
  std::variant<NodeId, int64_t, MachReg, Chunk, TypeRef, std::string, StmtRef,
               TupleRef>
      v_;
};

using Tuple = std::vector<Value>;

bool tuple_eq(const Tuple& a, const Tuple& b);
bool tuple_lt(const Tuple& a, const Tuple& b);

struct TupleLess {
  bool operator()(const Tuple& a, const Tuple& b) const {
    return tuple_lt(a, b);
  }
};

// Textual form used in dumps and reports: @401000 / @syn3, -8, %DI, MInt32,
// ty(ptr(int)), bare or quoted atoms, statement text, (v1, v2).
std::string render_value(const Value& v);
std::string render_tuple(const Tuple& t);

}  // namespace reclift
