#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "tss/checker.h"

namespace tss {

struct ReconstructionError : std::runtime_error {
  Pos pos;
  std::string deepest_goal;
  ReconstructionError(Pos p, const std::string& msg, std::string goal)
      : std::runtime_error(msg), pos(p), deepest_goal(std::move(goal)) {}
};

struct ReconstructOptions {
  size_t node_budget = 100000;
};

// Inserts Reconstructed delay/when?/now! nodes and call-site coercions.
// Throws TypeError when the untimed skeleton is ill-typed and
// ReconstructionError when only the temporal part fails.
ProcP elaborate_process(const TypeEnv& env, const Context& ctx, const ProcP& p,
                        const ChanDecl& offer, const ReconstructOptions& opts = {});

struct ElabError {
  enum class Kind { Type, Reconstruction };
  Kind kind;
  std::string def;
  Pos pos;
  std::string message;
};

// Elaborates every definition; failed definitions keep their source body.
Signature elaborate_signature(const TypeEnv& env, std::vector<ElabError>* errors,
                              const ReconstructOptions& opts = {});

// y:A |- x <- y :: (x:B) in the implicit system.
bool implicit_forward_ok(const TypeEnv& env, const TypeP& a, const TypeP& b);

// Deletes Reconstructed nodes, undoing coercions.
ProcP erase_reconstructed(const ProcP& p);
Signature erase_reconstructed(const Signature& sig);

// Strips ○, □ and ◇ everywhere.
TypeP erase_modalities(const TypeP& t);

}  // namespace tss
