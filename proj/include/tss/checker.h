#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tss/types.h"

namespace tss {

using Context = std::vector<ChanDecl>;

std::string show_sequent(const Context& ctx, const ChanDecl& offer);

struct TypeError : std::runtime_error {
  Pos pos;
  std::string rule;
  std::string expected;
  std::string found;
  std::string context;
  std::string def;
  TypeError(Pos p, std::string rule, const std::string& msg, std::string expected,
            std::string found, std::string context);
  std::string render() const;
};

struct CheckOptions {
  // Accept actual <= declared at call sites instead of type equality.
  bool call_subtyping = false;
};

std::optional<TypeError> check_process(const TypeEnv& env, const Context& ctx,
                                       const ProcP& p, const ChanDecl& offer,
                                       const CheckOptions& opts = {});

// Context and offer of a ground definition, named by its clause.
std::pair<Context, ChanDecl> definition_interface(const Signature& sig,
                                                  const std::string& name);

std::vector<TypeError> check_signature(const TypeEnv& env, const CheckOptions& opts = {});
std::vector<TypeError> check_signature_omp(const TypeEnv& env, const CheckOptions& opts = {});

}  // namespace tss
