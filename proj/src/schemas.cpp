#include "reclift/schemas.hpp"

#include "reclift/ir.hpp"

namespace reclift {

namespace {

Column col(std::string name, ValueTag tag,
           std::optional<IrLevel> lv = std::nullopt) {
  return Column{std::move(name), tag, lv};
}

RelationSchema rel(std::string name, std::vector<Column> cols,
                   std::optional<IrLevel> level = std::nullopt,
                   bool principal = false) {
  return RelationSchema{std::move(name), std::move(cols), level, principal};
}

}  // namespace

std::vector<RelationSchema> level_schemas() {
  std::vector<RelationSchema> out;
  for (int i = 0; i < kIrLevelCount; ++i) {
    auto lv = static_cast<IrLevel>(i);
    out.push_back(rel(principal_relation(lv),
                      {col("n", ValueTag::Node), col("s", ValueTag::Stmt, lv)},
                      lv, true));
    out.push_back(rel(edge_relation(lv),
                      {col("from", ValueTag::Node), col("to", ValueTag::Node),
                       col("kind", ValueTag::Atom)},
                      lv));
  }

  // Extensional auxiliaries from the frontend.
  out.push_back(rel("instr_next",
                    {col("n", ValueTag::Node), col("m", ValueTag::Node)}));
  out.push_back(
      rel("func", {col("name", ValueTag::Atom), col("entry", ValueTag::Node)}));
  out.push_back(rel("func_instr",
                    {col("f", ValueTag::Atom), col("n", ValueTag::Node)}));
  out.push_back(
      rel("reg_map", {col("name", ValueTag::Atom), col("r", ValueTag::Reg)}));
  out.push_back(rel("seed_sig",
                    {col("f", ValueTag::Atom), col("params", ValueTag::Tuple),
                     col("ret", ValueTag::Type),
                     col("variadic", ValueTag::Int)}));

  // Function structure.
  out.push_back(rel("func_entry",
                    {col("f", ValueTag::Atom), col("n", ValueTag::Node)}));
  out.push_back(rel("func_exit",
                    {col("f", ValueTag::Atom), col("n", ValueTag::Node)}));
  out.push_back(rel("node_role",
                    {col("n", ValueTag::Node), col("role", ValueTag::Atom)}));
  out.push_back(
      rel("syn_node", {col("n", ValueTag::Node), col("s", ValueTag::Node)}));
  out.push_back(rel("frame_info",
                    {col("f", ValueTag::Atom), col("size", ValueTag::Int),
                     col("ok", ValueTag::Int), col("calls", ValueTag::Int)}));

  // Flag-definition reachability at the asm level (cmp/test to jcc fusion).
  out.push_back(rel("asm_flag_reach",
                    {col("def", ValueTag::Node), col("at", ValueTag::Node)}));

  // Stack slots.
  out.push_back(rel("slot_desc",
                    {col("f", ValueTag::Atom), col("ofs", ValueTag::Int),
                     col("kind", ValueTag::Atom), col("width", ValueTag::Int),
                     col("spill", ValueTag::Int)}));
  out.push_back(rel("slot_def",
                    {col("f", ValueTag::Atom), col("ofs", ValueTag::Int),
                     col("n", ValueTag::Node)}));
  out.push_back(rel("slot_use",
                    {col("f", ValueTag::Atom), col("ofs", ValueTag::Int),
                     col("n", ValueTag::Node)}));
  out.push_back(rel("slot_reach",
                    {col("f", ValueTag::Atom), col("ofs", ValueTag::Int),
                     col("def", ValueTag::Node), col("n", ValueTag::Node)}));
  out.push_back(rel("slot_def_use",
                    {col("f", ValueTag::Atom), col("ofs", ValueTag::Int),
                     col("def", ValueTag::Node), col("use", ValueTag::Node)}));
  out.push_back(rel("slot_dead",
                    {col("f", ValueTag::Atom), col("ofs", ValueTag::Int),
                     col("n", ValueTag::Node)}));

  // Pseudo-register recovery.
  out.push_back(rel("pseudo_map",
                    {col("f", ValueTag::Atom), col("n", ValueTag::Node),
                     col("r", ValueTag::Reg), col("role", ValueTag::Atom),
                     col("p", ValueTag::Int)}));
  out.push_back(rel("param_reg",
                    {col("f", ValueTag::Atom), col("idx", ValueTag::Int),
                     col("p", ValueTag::Int)}));
  out.push_back(rel("ret_pseudo",
                    {col("f", ValueTag::Atom), col("p", ValueTag::Int)}));
  out.push_back(rel("pseudo_alias",
                    {col("f", ValueTag::Atom), col("old", ValueTag::Int),
                     col("canon", ValueTag::Int)}));
  out.push_back(rel("rtl_opt", {col("n", ValueTag::Node),
                                col("s", ValueTag::Stmt, IrLevel::Rtl)}));

  // Type inference and struct recovery.
  out.push_back(rel("deref",
                    {col("f", ValueTag::Atom), col("subj", ValueTag::Tuple),
                     col("ofs", ValueTag::Int), col("chunk", ValueTag::Chunk),
                     col("n", ValueTag::Node)}));
  out.push_back(rel("type_evidence",
                    {col("subj", ValueTag::Tuple), col("ty", ValueTag::Type),
                     col("src", ValueTag::Atom)}));
  out.push_back(rel("struct_hyp",
                    {col("subj", ValueTag::Tuple), col("ty", ValueTag::Type)}));
  out.push_back(rel("signature",
                    {col("f", ValueTag::Atom), col("params", ValueTag::Tuple),
                     col("ret", ValueTag::Type), col("variadic", ValueTag::Int),
                     col("prov", ValueTag::Atom)}));
  out.push_back(rel("global_sym",
                    {col("name", ValueTag::Atom), col("ty", ValueTag::Type)}));

  // Edge bypass closure used while eliminating optimized-away nodes.
  out.push_back(rel("csh_reach",
                    {col("from", ValueTag::Node), col("to", ValueTag::Node),
                     col("kind", ValueTag::Atom)}));

  // Structuring.
  out.push_back(rel("region",
                    {col("f", ValueTag::Atom), col("kind", ValueTag::Atom),
                     col("header", ValueTag::Node), col("rep", ValueTag::Node),
                     col("members", ValueTag::Tuple)}));

  // Clight candidate metadata: the variable-type assignment each candidate
  // was generated under.
  out.push_back(rel("clight_types",
                    {col("n", ValueTag::Node),
                     col("s", ValueTag::Stmt, IrLevel::Clight),
                     col("v", ValueTag::Int), col("ty", ValueTag::Type)}));

  // Diagnostics are facts too.
  out.push_back(rel("diag",
                    {col("n", ValueTag::Node), col("category", ValueTag::Atom),
                     col("message", ValueTag::Atom)}));

  return out;
}

void declare_level_schemas(Store& store) {
  for (auto& s : level_schemas()) store.declare(std::move(s));
}

}  // namespace reclift
