#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace reclift {

struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class TypeDesc;
// Interned C-subset type. Refs from the same table are pointer-unique;
// equality and ordering go through the canonical text so refs from different
// tables compare correctly.
using TypeRef = std::shared_ptr<const TypeDesc>;

struct StructField {
  int64_t offset = 0;
  std::string name;  // always "ofs_<offset>"
  TypeRef type;
};

class TypeDesc {
 public:
  enum class Kind { Void, Int, Long, Float, Pointer, Struct, Any64 };

  Kind kind = Kind::Void;
  int width = 0;         // Int: 8/16/32; Float: 32/64
  bool is_signed = true; // Int/Long
  TypeRef pointee;       // Pointer
  std::vector<StructField> fields;  // Struct
  bool degenerate = false;          // Struct with fewer than 2 fields
  std::string text;      // canonical structural rendering
  uint32_t index = 0;    // interning order within the owning table

  size_t byte_size() const;
};

inline bool type_eq(const TypeRef& a, const TypeRef& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->text == b->text;
}
inline bool type_lt(const TypeRef& a, const TypeRef& b) {
  if (!a) return static_cast<bool>(b);
  if (!b) return false;
  return a->text < b->text;
}

// Interns the recursive C-subset types shared by type inference, struct
// recovery and codegen. Interning is keyed on the canonical text, so equal
// structure always yields the same ref.
class CTypeTable {
 public:
  CTypeTable();

  TypeRef void_type() const { return void_; }
  TypeRef any64() const { return any64_; }
  TypeRef int_type(int width, bool is_signed);
  TypeRef long_type(bool is_signed);
  TypeRef float_type(int width);
  TypeRef pointer_to(TypeRef pointee);
  // Fields are (offset, type); names are generated as ofs_<offset>. Offsets
  // must be strictly increasing. Layouts with fewer than two fields are
  // flagged degenerate.
  TypeRef struct_of(std::vector<std::pair<int64_t, TypeRef>> fields);

  // Re-interns a type from its canonical text ("ptr(struct{0:int,4:float})").
  TypeRef parse(const std::string& text);
  // Consumes exactly one type starting at s[i]; advances i past it.
  TypeRef parse_prefix(const std::string& s, size_t& i);

  size_t size() const { return by_index_.size(); }
  TypeRef by_index(uint32_t idx) const;

 private:
  TypeRef intern(TypeDesc d);

  std::map<std::string, TypeRef> by_text_;
  std::vector<TypeRef> by_index_;
  TypeRef void_, any64_;
};

std::string render_type(const TypeRef& t);  // "<null>" safe on empty refs

}  // namespace reclift
