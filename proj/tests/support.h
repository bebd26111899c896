#pragma once

#include <string>
#include <vector>

#include "tss/corpus.h"

namespace testing_support {

inline std::string corpus(const std::string& file) {
  return tss::read_file(std::string(TSS_CORPUS_DIR) + "/" + file);
}

inline tss::Program load(const std::string& text, tss::CostModel cost,
                         std::vector<std::string> instances = {}, bool explicit_mode = false) {
  return tss::load_program(text, {cost, explicit_mode, std::move(instances)});
}

inline tss::TypeEnv env_of(const std::string& text) {
  return tss::TypeEnv(tss::ground_all(tss::parse_program(text)));
}

inline const char* kBits = "type bits = +{ b0 : ()bits, b1 : ()bits, $ : ()1 }\n";

}  // namespace testing_support
