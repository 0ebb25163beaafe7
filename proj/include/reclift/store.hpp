#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "reclift/provenance.hpp"
#include "reclift/value.hpp"

namespace reclift {

class CTypeTable;

struct StoreError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Column {
  std::string name;
  ValueTag tag = ValueTag::Int;
  std::optional<IrLevel> stmt_level;  // for stmt columns

  friend bool operator==(const Column&, const Column&) = default;
};

struct RelationSchema {
  std::string name;
  std::vector<Column> columns;
  std::optional<IrLevel> level;
  bool principal = false;

  friend bool operator==(const RelationSchema&, const RelationSchema&) =
      default;
};

// Row annotation, split into the extensional part (inserted facts, token
// generators) and the derived part (rule contributions). The tuple's
// annotation is their sum; keeping them apart makes fixpoint re-runs
// idempotent and the universality homomorphism exact.
struct AnnPair {
  SemiringValue ext;
  SemiringValue derived;

  SemiringValue total(size_t term_cap) const {
    return plus(ext, derived, term_cap);
  }
};

struct Relation {
  RelationSchema schema;
  std::map<Tuple, AnnPair, TupleLess> rows;
  bool checked_out = false;
};

struct TokenInfo {
  std::string rel;
  Tuple tuple;
  std::string note;  // source line for listing facts, empty otherwise
};

// Owned set of relations temporarily moved out of a store.
class RelationBundle {
 public:
  Relation* get(const std::string& name) {
    auto it = rels_.find(name);
    return it == rels_.end() ? nullptr : &it->second;
  }

 private:
  friend class Store;
  uint64_t store_id_ = 0;
  std::map<std::string, Relation> rels_;
};

// The annotated relation store: string-keyed K-relations with append-only
// insertion. All relations share one semiring mode.
class Store {
 public:
  explicit Store(SemiringTag mode = SemiringTag::Provenance,
                 size_t term_cap = Polynomial::kDefaultTermCap);

  SemiringTag mode() const { return mode_; }
  size_t term_cap() const { return term_cap_; }

  // Idempotent for identical schemas; mismatched redeclaration throws.
  void declare(RelationSchema schema);
  bool is_declared(const std::string& name) const;
  const RelationSchema& schema(const std::string& name) const;
  const Relation& relation(const std::string& name) const;
  std::vector<std::string> relation_names() const;

  // Extensional insert: the annotation becomes old (+) k. k must be nonzero
  // and match the mode.
  void insert(const std::string& rel, Tuple t, SemiringValue k);
  // Derived insert: the derived part becomes lub(old_derived, v); returns
  // true if the tuple's total annotation changed. Used by the fixpoint
  // engine and procedural passes, making re-derivation a no-op.
  bool insert_lub(const std::string& rel, Tuple t, SemiringValue v);
  // Allocates a fresh token for an extensional fact and inserts its
  // generator annotation (or the mode's one for coarser semirings).
  Token insert_extensional(const std::string& rel, Tuple t,
                           std::string note = {});

  SemiringValue annotation_of(const std::string& rel, const Tuple& t) const;
  bool has(const std::string& rel, const Tuple& t) const;

  // All (statement, annotation) candidates at a node, in statement order.
  std::vector<std::pair<Value, SemiringValue>> candidates(IrLevel level,
                                                          NodeId n) const;
  std::string principal_of(IrLevel level) const;

  NodeId alloc_synthetic();

  RelationBundle swap_out(const std::set<std::string>& names);
  void swap_in(RelationBundle&& bundle);

  uint64_t tokens_issued() const { return next_token_ - 1; }
  const TokenInfo& token_info(uint64_t id) const;

  struct Stats {
    std::map<std::string, size_t> tuple_counts;
    // |Cand_Clight(n)| distribution over nodes with at least one candidate.
    std::map<size_t, size_t> clight_histogram;
  };
  Stats stats() const;

  Store clone() const;

 private:
  friend bool store_leq(const Store& a, const Store& b);
  Relation& rel_mut(const std::string& name);
  void check_tuple(const RelationSchema& s, const Tuple& t) const;

  SemiringTag mode_;
  size_t term_cap_;
  std::map<std::string, Relation> rels_;
  uint64_t next_syn_ = 0;
  uint64_t next_token_ = 1;
  std::vector<TokenInfo> token_infos_;
  uint64_t store_id_;
};

// Pointwise natural-order comparison; requires identical schema sets.
bool store_leq(const Store& a, const Store& b);

// Flat fact-file dump: one tab-separated file per relation plus a _tokens
// file and a _meta file; round-trips losslessly.
void dump_facts(const Store& store, const std::string& dir,
                const std::set<std::string>& only = {});
void load_facts(Store& store, const std::string& dir, CTypeTable& types);
std::string render_relation(const Store& store, const std::string& rel);

}  // namespace reclift
