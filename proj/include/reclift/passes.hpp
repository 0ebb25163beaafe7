#pragma once

#include "reclift/engine.hpp"
#include "reclift/ir.hpp"

namespace reclift {

// Shared state for one decompilation run. Declarative rules built by the
// pass constructors capture the type table by reference, so a pipeline must
// not outlive its workspace.
struct Workspace {
  Store store;
  CTypeTable types;
  EngineConfig config;
  WitnessLog log;
  std::vector<PassStats> stats;

  explicit Workspace(SemiringTag mode = SemiringTag::Provenance,
                     size_t term_cap = Polynomial::kDefaultTermCap)
      : store(mode, term_cap) {}

  PassContext ctx() {
    return PassContext{store, types, config,
                       config.collect_firings ? &log : nullptr};
  }
};

struct PipelineOptions {
  bool enable_alloca = true;
  size_t candidate_cap = 16;  // per-statement Clight candidate cap
};

// Decompile passes.
Pass make_mach_prep();                      // frames, roles, synthetic nodes
Pass make_lift_mach();                      // instr -> mach_inst (rules)
Pass make_recognize_alloca();               // dynamic SUB rsp -> Mbuiltin
Pass make_mach_cover();                     // node-conservation diagnostics
Pass make_mach_cfg();                       // mach_succ edges, entry/exit
Pass make_normalize_ltl(CTypeTable& types); // Mach -> LTL slot normalization
Pass make_slot_analysis();                  // slot def/use/reach (rules)
Pass make_slot_dead();                      // dead-store flags
Pass make_recover_rtl();                    // webs -> pseudo registers -> RTL
Pass make_rtl_optimize();                   // copyprop, DSE, range merge
Pass make_infer_types(CTypeTable& types);   // type evidence rules
Pass make_recover_structs(CTypeTable& types);
Pass make_reconcile_signatures(CTypeTable& types);
Pass make_expr_trees();                     // RTL ops -> Cminor expr trees
Pass make_to_csharpminor(CTypeTable& types);
Pass make_structure_cfg();                  // dominators, regions
Pass make_emit_clight(CTypeTable& types, size_t candidate_cap);

std::vector<Pass> build_pipeline(Workspace& ws, const PipelineOptions& opt = {});

// Signature seed file: one "name: (t1, t2, ...) -> tr" entry per line, C
// type spellings, "..." for variadic tails. Populates seed_sig.
void load_signature_seeds(const std::string& text, Store& store,
                          CTypeTable& types);
// The bundled libc subset used when no seed file is given.
const std::string& builtin_signature_seeds();

// Subject encodings for type evidence.
Value pseudo_subject(const std::string& func, Pseudo p);
Value slot_subject(const std::string& func, int64_t ofs);

// C-subset type for the value a chunk loads.
TypeRef chunk_ctype(CTypeTable& types, Chunk c);

// Node roles that legitimately carry no statement.
bool skippable_role(const std::string& role);

}  // namespace reclift
