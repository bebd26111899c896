#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tss/cost.h"
#include "tss/reconstruct.h"
#include "tss/runtime.h"

namespace tss {

struct PipelineOptions {
  CostModel cost = CostModel::Free;
  bool explicit_mode = false;        // skip reconstruction
  std::vector<std::string> instances;  // e.g. "append[1,2,0]"
};

// One source file carried through every stage.
struct Program {
  Signature source;
  Signature ground;
  Signature instrumented;
  Signature elaborated;
  std::vector<ElabError> elab_errors;
  std::vector<TypeError> check_errors;
  std::shared_ptr<TypeEnv> env;  // over `elaborated`
  // Mangled names of the requested instances, in request order.
  std::vector<std::string> roots;

  bool ok() const { return elab_errors.empty() && check_errors.empty(); }
  std::vector<std::string> diagnostics() const;
};

// Splits "name[1,2]" into name and arguments.
std::pair<std::string, std::vector<uint64_t>> parse_instance(const std::string& s);

Signature merge(Signature a, const Signature& b);

Program load_program(const std::string& text, const PipelineOptions& opts);
std::string read_file(const std::string& path);

}  // namespace tss
