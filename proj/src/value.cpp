#include "reclift/value.hpp"

#include <array>
#include <sstream>

namespace reclift {

namespace {

constexpr std::array<const char*, kIrLevelCount> kLevelNames = {
    "x86Asm", "Mach", "LTL", "RTL", "Cminor", "Csharpminor", "Clight"};

constexpr std::array<const char*, kMachRegCount> kRegNames = {
    "AX",  "BX",  "CX",  "DX",  "SI",  "DI",  "BP",  "SP",
    "R8",  "R9",  "R10", "R11", "R12", "R13", "R14", "R15",
    "X0",  "X1",  "X2",  "X3",  "X4",  "X5",  "X6",  "X7",
    "X8",  "X9",  "X10", "X11", "X12", "X13", "X14", "X15"};

constexpr std::array<const char*, 9> kChunkNames = {
    "MInt8s",   "MInt8u",   "MInt16s", "MInt16u", "MInt32",
    "MInt64",   "MFloat32", "MFloat64", "Many64"};

}  // namespace

const char* to_string(IrLevel level) {
  return kLevelNames[static_cast<int>(level)];
}

std::optional<IrLevel> ir_level_from(const std::string& name) {
  for (int i = 0; i < kIrLevelCount; ++i)
    if (name == kLevelNames[i]) return static_cast<IrLevel>(i);
  return std::nullopt;
}

const char* to_string(MachReg r) { return kRegNames[static_cast<int>(r)]; }

std::optional<MachReg> mach_reg_from(const std::string& name) {
  for (int i = 0; i < kMachRegCount; ++i)
    if (name == kRegNames[i]) return static_cast<MachReg>(i);
  return std::nullopt;
}

const char* to_string(Chunk c) { return kChunkNames[static_cast<int>(c)]; }

std::optional<Chunk> chunk_from(const std::string& name) {
  for (size_t i = 0; i < kChunkNames.size(); ++i)
    if (name == kChunkNames[i]) return static_cast<Chunk>(i);
  return std::nullopt;
}

int chunk_size(Chunk c) {
  switch (c) {
    case Chunk::MInt8s:
    case Chunk::MInt8u:
      return 1;
    case Chunk::MInt16s:
    case Chunk::MInt16u:
      return 2;
    case Chunk::MInt32:
    case Chunk::MFloat32:
      return 4;
    default:
      return 8;
  }
}

bool chunk_signed(Chunk c) {
  switch (c) {
    case Chunk::MInt8s:
    case Chunk::MInt16s:
    case Chunk::MInt32:
    case Chunk::MInt64:
      return true;
    default:
      return false;
  }
}

bool chunk_is_float(Chunk c) {
  return c == Chunk::MFloat32 || c == Chunk::MFloat64;
}

const char* to_string(ValueTag tag) {
  switch (tag) {
    case ValueTag::Node:
      return "node";
    case ValueTag::Int:
      return "int";
    case ValueTag::Reg:
      return "reg";
    case ValueTag::Chunk:
      return "chunk";
    case ValueTag::Type:
      return "type";
    case ValueTag::Atom:
      return "atom";
    case ValueTag::Stmt:
      return "stmt";
    case ValueTag::Tuple:
      return "tuple";
  }
  return "?";
}

Value Value::type(TypeRef t) {
  if (!t) throw ValueError("null type ref");
  return Value(std::move(t));
}

Value Value::stmt(StmtRef s) {
  if (!s) throw ValueError("null stmt ref");
  return Value(std::move(s));
}

ValueTag Value::tag() const {
  return static_cast<ValueTag>(v_.index());
}

NodeId Value::as_node() const {
  if (auto* p = std::get_if<NodeId>(&v_)) return *p;
  throw ValueError("value is not a node");
}
int64_t Value::as_int() const {
  if (auto* p = std::get_if<int64_t>(&v_)) return *p;
  throw ValueError("value is not an int");
}
MachReg Value::as_reg() const {
  if (auto* p = std::get_if<MachReg>(&v_)) return *p;
  throw ValueError("value is not a reg");
}
Chunk Value::as_chunk() const {
  if (auto* p = std::get_if<Chunk>(&v_)) return *p;
  throw ValueError("value is not a chunk");
}
const TypeRef& Value::as_type() const {
  if (auto* p = std::get_if<TypeRef>(&v_)) return *p;
  throw ValueError("value is not a type");
}
const std::string& Value::as_atom() const {
  if (auto* p = std::get_if<std::string>(&v_)) return *p;
  throw ValueError("value is not an atom");
}
const StmtRef& Value::as_stmt() const {
  if (auto* p = std::get_if<StmtRef>(&v_)) return *p;
  throw ValueError("value is not a stmt");
}
const std::vector<Value>& Value::as_tuple() const {
  if (auto* p = std::get_if<TupleRef>(&v_)) return **p;
  throw ValueError("value is not a tuple");
}

bool Value::operator==(const Value& o) const {
  if (v_.index() != o.v_.index()) return false;
  switch (tag()) {
    case ValueTag::Node:
      return as_node() == o.as_node();
    case ValueTag::Int:
      return as_int() == o.as_int();
    case ValueTag::Reg:
      return as_reg() == o.as_reg();
    case ValueTag::Chunk:
      return as_chunk() == o.as_chunk();
    case ValueTag::Type:
      return type_eq(as_type(), o.as_type());
    case ValueTag::Atom:
      return as_atom() == o.as_atom();
    case ValueTag::Stmt: {
      const auto& a = as_stmt();
      const auto& b = o.as_stmt();
      return a->level == b->level && a->text == b->text;
    }
    case ValueTag::Tuple:
      return tuple_eq(as_tuple(), o.as_tuple());
  }
  return false;
}

bool Value::operator<(const Value& o) const {
  if (v_.index() != o.v_.index()) return v_.index() < o.v_.index();
  switch (tag()) {
    case ValueTag::Node:
      return as_node() < o.as_node();
    case ValueTag::Int:
      return as_int() < o.as_int();
    case ValueTag::Reg:
      return as_reg() < o.as_reg();
    case ValueTag::Chunk:
      return as_chunk() < o.as_chunk();
    case ValueTag::Type:
      return type_lt(as_type(), o.as_type());
    case ValueTag::Atom:
      return as_atom() < o.as_atom();
    case ValueTag::Stmt: {
      const auto& a = as_stmt();
      const auto& b = o.as_stmt();
      if (a->level != b->level) return a->level < b->level;
      return a->text < b->text;
    }
    case ValueTag::Tuple:
      return tuple_lt(as_tuple(), o.as_tuple());
  }
  return false;
}

size_t Value::hash() const {
  size_t h = std::hash<size_t>{}(v_.index());
  auto mix = [&h](size_t x) {
    h ^= x + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  switch (tag()) {
    case ValueTag::Node:
      mix(std::hash<uint64_t>{}(as_node().value));
      break;
    case ValueTag::Int:
      mix(std::hash<int64_t>{}(as_int()));
      break;
    case ValueTag::Reg:
      mix(static_cast<size_t>(as_reg()));
      break;
    case ValueTag::Chunk:
      mix(static_cast<size_t>(as_chunk()));
      break;
    case ValueTag::Type:
      mix(std::hash<std::string>{}(as_type()->text));
      break;
    case ValueTag::Atom:
      mix(std::hash<std::string>{}(as_atom()));
      break;
    case ValueTag::Stmt:
      mix(std::hash<std::string>{}(as_stmt()->text));
      mix(static_cast<size_t>(as_stmt()->level));
      break;
    case ValueTag::Tuple:
      for (const auto& v : as_tuple()) mix(v.hash());
      break;
  }
  return h;
}

bool tuple_eq(const Tuple& a, const Tuple& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}

bool tuple_lt(const Tuple& a, const Tuple& b) {
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (a[i] < b[i]) return true;
    if (b[i] < a[i]) return false;
  }
  return a.size() < b.size();
}

namespace {

bool is_bare_atom(const std::string& s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s[0]);
  if (!std::isalpha(head) && s[0] != '_') return false;
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (!std::isalnum(u) && c != '_' && c != '.' && c != '$') return false;
  }
  return true;
}

void render_atom(std::ostringstream& os, const std::string& s) {
  if (is_bare_atom(s)) {
    os << s;
    return;
  }
  os << '"';
  for (char c : s) {
    switch (c) {
      case '"':
        os << "\\\"";
        break;
      case '\\':
        os << "\\\\";
        break;
      case '\t':
        os << "\\t";
        break;
      case '\n':
        os << "\\n";
        break;
      default:
        os << c;
    }
  }
  os << '"';
}

}  // namespace

std::string render_value(const Value& v) {
  std::ostringstream os;
  switch (v.tag()) {
    case ValueTag::Node: {
      NodeId n = v.as_node();
      if (n.is_synthetic())
        os << "@syn" << n.syn_index();
      else
        os << "@" << std::hex << n.value;
      break;
    }
    case ValueTag::Int:
      os << v.as_int();
      break;
    case ValueTag::Reg:
      os << "%" << to_string(v.as_reg());
      break;
    case ValueTag::Chunk:
      os << to_string(v.as_chunk());
      break;
    case ValueTag::Type:
      os << "ty(" << v.as_type()->text << ")";
      break;
    case ValueTag::Atom:
      render_atom(os, v.as_atom());
      break;
    case ValueTag::Stmt:
      os << v.as_stmt()->text;
      break;
    case ValueTag::Tuple: {
      os << "(";
      const auto& t = v.as_tuple();
      for (size_t i = 0; i < t.size(); ++i) {
        if (i) os << ", ";
        os << render_value(t[i]);
      }
      os << ")";
      break;
    }
  }
  return os.str();
}

std::string render_tuple(const Tuple& t) {
  std::ostringstream os;
  for (size_t i = 0; i < t.size(); ++i) {
    if (i) os << "\t";
    os << render_value(t[i]);
  }
  return os.str();
}

}  // namespace reclift
