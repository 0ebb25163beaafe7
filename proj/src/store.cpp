#include "reclift/store.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "reclift/ir.hpp"

namespace reclift {

namespace {

std::atomic<uint64_t> g_store_counter{1};

}  // namespace

Store::Store(SemiringTag mode, size_t term_cap)
    : mode_(mode), term_cap_(term_cap), store_id_(g_store_counter++) {}

void Store::declare(RelationSchema schema) {
  if (schema.columns.empty())
    throw StoreError("relation " + schema.name + " needs at least one column");
  auto it = rels_.find(schema.name);
  if (it != rels_.end()) {
    if (!(it->second.schema == schema))
      throw StoreError("relation " + schema.name +
                       " redeclared with a different schema");
    return;
  }
  if (schema.principal && schema.level) {
    for (auto& [name, rel] : rels_)
      if (rel.schema.principal && rel.schema.level == schema.level)
        throw StoreError("level " + std::string(to_string(*schema.level)) +
                         " already has principal relation " + name);
  }
  Relation r;
  r.schema = std::move(schema);
  auto name = r.schema.name;
  rels_.emplace(std::move(name), std::move(r));
}

bool Store::is_declared(const std::string& name) const {
  return rels_.count(name) > 0;
}

const RelationSchema& Store::schema(const std::string& name) const {
  return relation(name).schema;
}

const Relation& Store::relation(const std::string& name) const {
  auto it = rels_.find(name);
  if (it == rels_.end()) throw StoreError("unknown relation " + name);
  return it->second;
}

Relation& Store::rel_mut(const std::string& name) {
  auto it = rels_.find(name);
  if (it == rels_.end()) throw StoreError("unknown relation " + name);
  return it->second;
}

std::vector<std::string> Store::relation_names() const {
  std::vector<std::string> out;
  out.reserve(rels_.size());
  for (auto& [name, rel] : rels_) out.push_back(name);
  return out;
}

void Store::check_tuple(const RelationSchema& s, const Tuple& t) const {
  if (t.size() != s.columns.size())
    throw StoreError("arity mismatch for " + s.name + ": got " +
                     std::to_string(t.size()) + ", declared " +
                     std::to_string(s.columns.size()));
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i].tag() != s.columns[i].tag)
      throw StoreError("column " + s.columns[i].name + " of " + s.name +
                       " expects " + to_string(s.columns[i].tag) + ", got " +
                       to_string(t[i].tag()));
    if (t[i].tag() == ValueTag::Stmt && s.columns[i].stmt_level &&
        t[i].as_stmt()->level != *s.columns[i].stmt_level)
      throw StoreError("column " + s.columns[i].name + " of " + s.name +
                       " expects a " + to_string(*s.columns[i].stmt_level) +
                       " statement");
  }
}

void Store::insert(const std::string& rel, Tuple t, SemiringValue k) {
  if (is_zero(k)) throw StoreError("zero annotation rejected for " + rel);
  if (k.tag() != mode_)
    throw StoreError("annotation tag mismatch for " + rel);
  auto& r = rel_mut(rel);
  check_tuple(r.schema, t);
  auto it = r.rows.find(t);
  if (it == r.rows.end()) {
    AnnPair a{std::move(k), SemiringValue::zero(mode_)};
    r.rows.emplace(std::move(t), std::move(a));
  } else {
    it->second.ext = plus(it->second.ext, k, term_cap_);
  }
}

bool Store::insert_lub(const std::string& rel, Tuple t, SemiringValue v) {
  if (is_zero(v)) return false;
  if (v.tag() != mode_)
    throw StoreError("annotation tag mismatch for " + rel);
  auto& r = rel_mut(rel);
  check_tuple(r.schema, t);
  auto it = r.rows.find(t);
  if (it == r.rows.end()) {
    AnnPair a{SemiringValue::zero(mode_), std::move(v)};
    r.rows.emplace(std::move(t), std::move(a));
    return true;
  }
  SemiringValue merged = lub(it->second.derived, v, term_cap_);
  if (merged == it->second.derived) return false;
  SemiringValue old_total = it->second.total(term_cap_);
  it->second.derived = std::move(merged);
  return !(it->second.total(term_cap_) == old_total);
}

Token Store::insert_extensional(const std::string& rel, Tuple t,
                                std::string note) {
  Token tok{next_token_++};
  token_infos_.push_back(TokenInfo{rel, t, std::move(note)});
  insert(rel, std::move(t), SemiringValue::from_token(tok, mode_));
  return tok;
}

SemiringValue Store::annotation_of(const std::string& rel,
                                   const Tuple& t) const {
  const auto& r = relation(rel);
  auto it = r.rows.find(t);
  if (it == r.rows.end()) return SemiringValue::zero(mode_);
  return it->second.total(term_cap_);
}

bool Store::has(const std::string& rel, const Tuple& t) const {
  const auto& r = relation(rel);
  return r.rows.count(t) > 0;
}

std::string Store::principal_of(IrLevel level) const {
  for (auto& [name, rel] : rels_)
    if (rel.schema.principal && rel.schema.level == level) return name;
  throw StoreError(std::string("level ") + to_string(level) +
                   " has no principal relation");
}

std::vector<std::pair<Value, SemiringValue>> Store::candidates(
    IrLevel level, NodeId n) const {
  const auto& r = relation(principal_of(level));
  std::vector<std::pair<Value, SemiringValue>> out;
  Tuple probe{Value::node(n)};
  for (auto it = r.rows.lower_bound(probe); it != r.rows.end(); ++it) {
    if (!(it->first[0] == probe[0])) break;
    out.emplace_back(it->first[1], it->second.total(term_cap_));
  }
  return out;
}

NodeId Store::alloc_synthetic() { return NodeId::synthetic(next_syn_++); }

RelationBundle Store::swap_out(const std::set<std::string>& names) {
  for (const auto& name : names)
    if (relation(name).checked_out)
      throw StoreError("relation " + name + " is already checked out");
  RelationBundle b;
  b.store_id_ = store_id_;
  for (const auto& name : names) {
    auto& r = rel_mut(name);
    Relation taken;
    taken.schema = r.schema;
    taken.rows.swap(r.rows);
    r.checked_out = true;
    b.rels_.emplace(name, std::move(taken));
  }
  return b;
}

void Store::swap_in(RelationBundle&& bundle) {
  if (bundle.store_id_ != store_id_)
    throw StoreError("bundle belongs to a different store");
  for (auto& [name, taken] : bundle.rels_) {
    auto& r = rel_mut(name);
    if (!r.checked_out)
      throw StoreError("relation " + name + " was not checked out");
    // Tuples inserted while checked out are merged back with (+).
    for (auto& [t, k] : r.rows) {
      auto it = taken.rows.find(t);
      if (it == taken.rows.end()) {
        taken.rows.emplace(t, k);
      } else {
        it->second.ext = plus(it->second.ext, k.ext, term_cap_);
        it->second.derived = lub(it->second.derived, k.derived, term_cap_);
      }
    }
    r.rows.swap(taken.rows);
    r.checked_out = false;
  }
  bundle.rels_.clear();
}

const TokenInfo& Store::token_info(uint64_t id) const {
  if (id == 0 || id > token_infos_.size())
    throw StoreError("unknown token x" + std::to_string(id));
  return token_infos_[id - 1];
}

Store::Stats Store::stats() const {
  Stats st;
  for (auto& [name, rel] : rels_) st.tuple_counts[name] = rel.rows.size();
  auto it = rels_.find("clight_stmt");
  if (it != rels_.end()) {
    std::map<NodeId, size_t> per_node;
    for (auto& [t, k] : it->second.rows) per_node[t[0].as_node()]++;
    for (auto& [n, count] : per_node) st.clight_histogram[count]++;
  }
  return st;
}

Store Store::clone() const {
  Store copy(mode_, term_cap_);
  copy.rels_ = rels_;
  copy.next_syn_ = next_syn_;
  copy.next_token_ = next_token_;
  copy.token_infos_ = token_infos_;
  return copy;
}

bool store_leq(const Store& a, const Store& b) {
  for (auto& [name, ra] : a.rels_) {
    auto it = b.rels_.find(name);
    if (it == b.rels_.end() || !(it->second.schema == ra.schema))
      throw StoreError("schema mismatch on " + name);
  }
  for (auto& [name, rb] : b.rels_)
    if (!a.rels_.count(name)) throw StoreError("schema mismatch on " + name);
  for (auto& [name, ra] : a.rels_) {
    const auto& rb = b.rels_.at(name);
    for (auto& [t, k] : ra.rows) {
      auto it = rb.rows.find(t);
      if (it == rb.rows.end()) return false;
      if (!leq(k.total(a.term_cap_), it->second.total(b.term_cap_)))
        return false;
    }
  }
  return true;
}

// ---- dump / load -------------------------------------------------------------

namespace {

std::string tag_spec(const Column& c) {
  std::string s = to_string(c.tag);
  if (c.tag == ValueTag::Stmt && c.stmt_level)
    s += std::string(":") + to_string(*c.stmt_level);
  return s;
}

Column parse_col_spec(const std::string& name, const std::string& spec) {
  Column c;
  c.name = name;
  auto colon = spec.find(':');
  std::string tag = spec.substr(0, colon);
  static const std::map<std::string, ValueTag> kTags = {
      {"node", ValueTag::Node},   {"int", ValueTag::Int},
      {"reg", ValueTag::Reg},     {"chunk", ValueTag::Chunk},
      {"type", ValueTag::Type},   {"atom", ValueTag::Atom},
      {"stmt", ValueTag::Stmt},   {"tuple", ValueTag::Tuple}};
  auto it = kTags.find(tag);
  if (it == kTags.end()) throw StoreError("bad column tag " + spec);
  c.tag = it->second;
  if (colon != std::string::npos) {
    auto lv = ir_level_from(spec.substr(colon + 1));
    if (!lv) throw StoreError("bad stmt level in " + spec);
    c.stmt_level = lv;
  }
  return c;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string render_relation(const Store& store, const std::string& rel) {
  const auto& r = store.relation(rel);
  std::ostringstream os;
  os << "rel\t" << r.schema.name;
  if (r.schema.level) os << "\tlevel=" << to_string(*r.schema.level);
  if (r.schema.principal) os << "\tprincipal";
  os << "\n";
  for (const auto& c : r.schema.columns)
    os << "col\t" << c.name << "\t" << tag_spec(c) << "\n";
  for (const auto& [t, k] : r.rows)
    os << "row\t" << render_tuple(t) << "\t" << render(k.total(store.term_cap()))
       << "\n";
  return os.str();
}

void dump_facts(const Store& store, const std::string& dir,
                const std::set<std::string>& only) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream meta(fs::path(dir) / "_meta");
    meta << "semiring\t" << to_string(store.mode()) << "\n";
  }
  for (const auto& name : store.relation_names()) {
    if (!only.empty() && !only.count(name)) continue;
    std::ofstream out(fs::path(dir) / (name + ".facts"));
    out << render_relation(store, name);
  }
  if (only.empty()) {
    std::ofstream out(fs::path(dir) / "_tokens.facts");
    for (uint64_t id = 1; id <= store.tokens_issued(); ++id) {
      const auto& info = store.token_info(id);
      out << "x" << id << "\t" << info.rel << "\t" << render_value(Value::tuple(
                 info.tuple))
          << "\t" << info.note << "\n";
    }
  }
}

namespace {

void load_relation_stream(Store& store, std::istream& in, CTypeTable& types) {
  std::string line;
  RelationSchema schema;
  bool have_schema = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_tabs(line);
    if (fields[0] == "rel") {
      schema = RelationSchema{};
      schema.name = fields.at(1);
      for (size_t i = 2; i < fields.size(); ++i) {
        if (fields[i] == "principal")
          schema.principal = true;
        else if (fields[i].rfind("level=", 0) == 0) {
          auto lv = ir_level_from(fields[i].substr(6));
          if (!lv) throw StoreError("bad level in " + fields[i]);
          schema.level = lv;
        }
      }
      have_schema = false;  // columns still pending
    } else if (fields[0] == "col") {
      schema.columns.push_back(parse_col_spec(fields.at(1), fields.at(2)));
    } else if (fields[0] == "row") {
      if (!have_schema) {
        store.declare(schema);
        have_schema = true;
      }
      const auto& cols = store.schema(schema.name).columns;
      if (fields.size() != cols.size() + 2)
        throw StoreError("bad row arity in " + schema.name);
      Tuple t;
      for (size_t i = 0; i < cols.size(); ++i)
        t.push_back(parse_value(fields[i + 1], cols[i].tag,
                                cols[i].stmt_level, types));
      auto ann = parse_semiring_value(fields.back(), store.mode());
      store.insert(schema.name, std::move(t), std::move(ann));
    }
  }
  if (!have_schema && !schema.name.empty()) store.declare(schema);
}

}  // namespace

void load_facts(Store& store, const std::string& dir, CTypeTable& types) {
  namespace fs = std::filesystem;
  {
    std::ifstream meta(fs::path(dir) / "_meta");
    std::string line;
    if (meta && std::getline(meta, line)) {
      auto fields = split_tabs(line);
      if (fields.size() == 2 && fields[0] == "semiring") {
        auto tag = semiring_tag_from(fields[1]);
        if (tag && *tag != store.mode())
          throw StoreError("fact dump was written in " + fields[1] +
                           " mode, store is " + to_string(store.mode()));
      }
    }
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 6 &&
        name.substr(name.size() - 6) == ".facts" && name[0] != '_')
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw StoreError("cannot read " + f.string());
    load_relation_stream(store, in, types);
  }
}

}  // namespace reclift
