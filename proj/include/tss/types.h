#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "tss/syntax.h"

namespace tss {

struct ContractivenessError : std::runtime_error {
  std::string name;
  explicit ContractivenessError(std::string n)
      : std::runtime_error("type definition '" + n + "' is not contractive"),
        name(std::move(n)) {}
};

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ground signature plus the operations that need its type definitions.
class TypeEnv {
 public:
  explicit TypeEnv(Signature sig);

  const Signature& sig() const { return *sig_; }
  std::shared_ptr<const Signature> sig_ptr() const { return sig_; }
  bool defined(const std::string& name) const { return defs_.count(name) > 0; }

  // One unfolding step when t is a Name, identity otherwise.
  TypeP unfold(const TypeP& t) const;
  // Unfolds until the head is a constructor or modality.
  TypeP head(const TypeP& t) const;

  size_t equality_budget = 10000;

 private:
  std::shared_ptr<const Signature> sig_;
  std::unordered_map<std::string, TypeP> defs_;
};

void check_contractive(const Signature& sig);

bool type_equal(const TypeEnv& env, const TypeP& a, const TypeP& b);

// [t]_L^{-1} and [t]_R^{-1}; nullopt when undefined.
std::optional<TypeP> shift_left(const TypeEnv& env, const TypeP& t);
std::optional<TypeP> shift_right(const TypeEnv& env, const TypeP& t);
std::optional<TypeP> shift_left_n(const TypeEnv& env, const TypeP& t, uint64_t n);
std::optional<TypeP> shift_right_n(const TypeEnv& env, const TypeP& t, uint64_t n);

enum class Side { Box, Diamond };
bool patient(const TypeEnv& env, const TypeP& t, Side side);

// Splits t into ○^n and the first non-○ head (names unfolded).
std::pair<uint64_t, TypeP> strip_next(const TypeEnv& env, const TypeP& t);

// Hash/equality functors for syntactic type keys.
struct TypeKeyHash {
  size_t operator()(const TypeP& t) const { return type_hash(t); }
};
struct TypeKeyEq {
  bool operator()(const TypeP& a, const TypeP& b) const { return same_type(a, b); }
};
struct TypePairHash {
  size_t operator()(const std::pair<TypeP, TypeP>& p) const {
    return type_hash(p.first) * 1000003u ^ type_hash(p.second);
  }
};
struct TypePairEq {
  bool operator()(const std::pair<TypeP, TypeP>& a,
                  const std::pair<TypeP, TypeP>& b) const {
    return same_type(a.first, b.first) && same_type(a.second, b.second);
  }
};

}  // namespace tss
