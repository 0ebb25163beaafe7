#include "reclift/ctypes.hpp"

#include <charconv>
#include <cstring>
#include <sstream>

namespace reclift {

size_t TypeDesc::byte_size() const {
  switch (kind) {
    case Kind::Void:
      return 0;
    case Kind::Int:
      return static_cast<size_t>(width / 8);
    case Kind::Long:
    case Kind::Pointer:
    case Kind::Any64:
      return 8;
    case Kind::Float:
      return static_cast<size_t>(width / 8);
    case Kind::Struct: {
      if (fields.empty()) return 0;
      const auto& last = fields.back();
      return static_cast<size_t>(last.offset) +
             (last.type ? last.type->byte_size() : 0);
    }
  }
  return 0;
}

namespace {

std::string text_of(const TypeDesc& d) {
  switch (d.kind) {
    case TypeDesc::Kind::Void:
      return "void";
    case TypeDesc::Kind::Any64:
      return "any64";
    case TypeDesc::Kind::Int:
      switch (d.width) {
        case 8:
          return d.is_signed ? "i8" : "u8";
        case 16:
          return d.is_signed ? "i16" : "u16";
        case 32:
          return d.is_signed ? "int" : "uint";
      }
      throw TypeError("bad int width");
    case TypeDesc::Kind::Long:
      return d.is_signed ? "long" : "ulong";
    case TypeDesc::Kind::Float:
      if (d.width == 32) return "float";
      if (d.width == 64) return "double";
      throw TypeError("bad float width");
    case TypeDesc::Kind::Pointer:
      return "ptr(" + d.pointee->text + ")";
    case TypeDesc::Kind::Struct: {
      std::ostringstream os;
      os << "struct{";
      for (size_t i = 0; i < d.fields.size(); ++i) {
        if (i) os << ",";
        os << d.fields[i].offset << ":" << d.fields[i].type->text;
      }
      os << "}";
      return os.str();
    }
  }
  throw TypeError("bad type kind");
}

}  // namespace

CTypeTable::CTypeTable() {
  TypeDesc v;
  v.kind = TypeDesc::Kind::Void;
  void_ = intern(std::move(v));
  // Fixed interning order for the scalar types keeps candidate enumeration
  // order stable across runs.
  for (int w : {8, 16, 32})
    for (bool s : {true, false}) int_type(w, s);
  long_type(true);
  long_type(false);
  float_type(32);
  float_type(64);
  TypeDesc a;
  a.kind = TypeDesc::Kind::Any64;
  any64_ = intern(std::move(a));
}

TypeRef CTypeTable::intern(TypeDesc d) {
  d.text = text_of(d);
  auto it = by_text_.find(d.text);
  if (it != by_text_.end()) return it->second;
  d.index = static_cast<uint32_t>(by_index_.size());
  auto ref = std::make_shared<const TypeDesc>(std::move(d));
  by_text_.emplace(ref->text, ref);
  by_index_.push_back(ref);
  return ref;
}

TypeRef CTypeTable::int_type(int width, bool is_signed) {
  if (width != 8 && width != 16 && width != 32)
    throw TypeError("int width must be 8/16/32");
  TypeDesc d;
  d.kind = TypeDesc::Kind::Int;
  d.width = width;
  d.is_signed = is_signed;
  return intern(std::move(d));
}

TypeRef CTypeTable::long_type(bool is_signed) {
  TypeDesc d;
  d.kind = TypeDesc::Kind::Long;
  d.width = 64;
  d.is_signed = is_signed;
  return intern(std::move(d));
}

TypeRef CTypeTable::float_type(int width) {
  if (width != 32 && width != 64) throw TypeError("float width must be 32/64");
  TypeDesc d;
  d.kind = TypeDesc::Kind::Float;
  d.width = width;
  return intern(std::move(d));
}

TypeRef CTypeTable::pointer_to(TypeRef pointee) {
  if (!pointee) throw TypeError("pointer_to: null pointee");
  TypeDesc d;
  d.kind = TypeDesc::Kind::Pointer;
  d.pointee = std::move(pointee);
  return intern(std::move(d));
}

TypeRef CTypeTable::struct_of(std::vector<std::pair<int64_t, TypeRef>> fields) {
  TypeDesc d;
  d.kind = TypeDesc::Kind::Struct;
  int64_t prev = INT64_MIN;
  for (auto& [ofs, ty] : fields) {
    if (!ty) throw TypeError("struct_of: null field type");
    if (ofs <= prev) throw TypeError("struct_of: offsets must increase");
    prev = ofs;
    d.fields.push_back({ofs, "ofs_" + std::to_string(ofs), std::move(ty)});
  }
  d.degenerate = d.fields.size() < 2;
  return intern(std::move(d));
}

TypeRef CTypeTable::by_index(uint32_t idx) const {
  if (idx >= by_index_.size()) throw TypeError("type index out of range");
  return by_index_[idx];
}

TypeRef CTypeTable::parse(const std::string& text) {
  size_t i = 0;
  TypeRef t = parse_prefix(text, i);
  if (i != text.size()) throw TypeError("trailing characters in type: " + text);
  return t;
}

TypeRef CTypeTable::parse_prefix(const std::string& s, size_t& i) {
  auto starts = [&](const char* w) {
    size_t n = strlen(w);
    if (s.compare(i, n, w) == 0) {
      i += n;
      return true;
    }
    return false;
  };
  if (starts("void")) return void_type();
  if (starts("any64")) return any64();
  if (starts("int")) return int_type(32, true);
  if (starts("uint")) return int_type(32, false);
  if (starts("i8")) return int_type(8, true);
  if (starts("u8")) return int_type(8, false);
  if (starts("i16")) return int_type(16, true);
  if (starts("u16")) return int_type(16, false);
  if (starts("long")) return long_type(true);
  if (starts("ulong")) return long_type(false);
  if (starts("float")) return float_type(32);
  if (starts("double")) return float_type(64);
  if (starts("ptr(")) {
    TypeRef inner = parse_prefix(s, i);
    if (i >= s.size() || s[i] != ')') throw TypeError("expected ) in: " + s);
    ++i;
    return pointer_to(inner);
  }
  if (starts("struct{")) {
    std::vector<std::pair<int64_t, TypeRef>> fields;
    if (i < s.size() && s[i] == '}') {
      ++i;
      return struct_of({});
    }
    while (true) {
      int64_t ofs = 0;
      auto [p, ec] = std::from_chars(s.data() + i, s.data() + s.size(), ofs);
      if (ec != std::errc()) throw TypeError("bad struct offset in: " + s);
      i = static_cast<size_t>(p - s.data());
      if (i >= s.size() || s[i] != ':') throw TypeError("expected : in: " + s);
      ++i;
      fields.emplace_back(ofs, parse_prefix(s, i));
      if (i < s.size() && s[i] == ',') {
        ++i;
        continue;
      }
      if (i < s.size() && s[i] == '}') {
        ++i;
        break;
      }
      throw TypeError("expected , or } in: " + s);
    }
    return struct_of(std::move(fields));
  }
  throw TypeError("unrecognized type at '" + s.substr(i) + "'");
}

std::string render_type(const TypeRef& t) { return t ? t->text : "<null>"; }

}  // namespace reclift
