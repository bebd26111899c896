#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tss/types.h"

namespace tss {

struct SubtypeOptions {
  size_t goal_budget = 100000;
  std::vector<std::string>* trace = nullptr;  // rule applications on success path
};

// A <= B under refl, ○○, □○, ○◇, □R, □L, ◇R, ◇L.
bool is_subtype(const TypeEnv& env, const TypeP& a, const TypeP& b,
                const SubtypeOptions& opts = {});

// A <: B: refl, ○^m□A <: ○^n□A (m <= n), ○^m◇A <: ○^n◇A (m >= n).
bool is_weak_subtype(const TypeEnv& env, const TypeP& a, const TypeP& b);

// Modal prefixes over one basic type: sequences of ○^k (k in 1..max_next),
// □ and ◇ of length <= depth, no two ○ layers adjacent.
std::vector<TypeP> enumerate_universe(const TypeP& base, int depth, int max_next);

// Row-major |ts| x |ts| relation matrices.
std::vector<uint8_t> subtype_matrix_serial(const TypeEnv& env, const std::vector<TypeP>& ts);
std::vector<uint8_t> subtype_matrix_omp(const TypeEnv& env, const std::vector<TypeP>& ts);

}  // namespace tss
