#include "tss/types.h"

#include <unordered_set>

namespace tss {

namespace {
constexpr int kHeadGuard = 4096;
}

TypeEnv::TypeEnv(Signature sig)
    : sig_(std::make_shared<const Signature>(std::move(sig))) {
  for (auto& t : sig_->types)
    if (t.arity() == 0 && !t.clauses.empty()) defs_[t.name] = t.clauses[0].body;
}

TypeP TypeEnv::unfold(const TypeP& t) const {
  if (t->kind != TK::Name) return t;
  auto it = defs_.find(t->name);
  if (it == defs_.end()) throw std::out_of_range("undefined type " + t->name);
  return it->second;
}

TypeP TypeEnv::head(const TypeP& t) const {
  TypeP h = t;
  for (int i = 0; h->kind == TK::Name; ++i) {
    if (i > kHeadGuard) throw ContractivenessError(t->name);
    h = unfold(h);
  }
  return h;
}

void check_contractive(const Signature& sig) {
  for (auto& t : sig.types)
    for (auto& c : t.clauses)
      if (c.body->kind == TK::Name) throw ContractivenessError(t.name);
}

namespace {

class Equality {
 public:
  explicit Equality(const TypeEnv& env) : env_(env) {}

  bool eq(const TypeP& a, const TypeP& b) {
    if (a == b || same_type(a, b)) return true;
    if (a->kind == TK::Name || b->kind == TK::Name) {
      if (!assumed_.insert({a, b}).second) return true;
      if (assumed_.size() > env_.equality_budget)
        throw BudgetExceeded("type equality exceeded its pair budget");
    }
    TypeP x = env_.head(a), y = env_.head(b);
    if (x->kind == TK::Next && y->kind == TK::Next) {
      uint64_t k = std::min(x->n, y->n);
      return eq(t_next(x->n - k, x->a), t_next(y->n - k, y->a));
    }
    if (x->kind != y->kind) return false;
    switch (x->kind) {
      case TK::One: return true;
      case TK::Plus:
      case TK::With: {
        if (x->branches.size() != y->branches.size()) return false;
        for (auto& [l, bx] : x->branches) {
          const TypeP* by = nullptr;
          for (auto& [m, t] : y->branches)
            if (m == l) by = &t;
          if (!by || !eq(bx, *by)) return false;
        }
        return true;
      }
      case TK::Tensor:
      case TK::Lolli: return eq(x->a, y->a) && eq(x->b, y->b);
      case TK::Box:
      case TK::Diamond: return eq(x->a, y->a);
      default: return false;
    }
  }

 private:
  const TypeEnv& env_;
  std::unordered_set<std::pair<TypeP, TypeP>, TypePairHash, TypePairEq> assumed_;
};

}  // namespace

bool type_equal(const TypeEnv& env, const TypeP& a, const TypeP& b) {
  return Equality(env).eq(a, b);
}

std::optional<TypeP> shift_left_n(const TypeEnv& env, const TypeP& t, uint64_t n) {
  TypeP cur = t;
  for (int guard = 0; n > 0; ++guard) {
    if (guard > kHeadGuard) return std::nullopt;
    TypeP h = env.head(cur);
    if (h->kind == TK::Box) return cur;
    if (h->kind != TK::Next) return std::nullopt;
    if (n <= h->n) return t_next(h->n - n, h->a);
    n -= h->n;
    cur = h->a;
  }
  return cur;
}

std::optional<TypeP> shift_right_n(const TypeEnv& env, const TypeP& t, uint64_t n) {
  TypeP cur = t;
  for (int guard = 0; n > 0; ++guard) {
    if (guard > kHeadGuard) return std::nullopt;
    TypeP h = env.head(cur);
    if (h->kind == TK::Diamond) return cur;
    if (h->kind != TK::Next) return std::nullopt;
    if (n <= h->n) return t_next(h->n - n, h->a);
    n -= h->n;
    cur = h->a;
  }
  return cur;
}

std::optional<TypeP> shift_left(const TypeEnv& env, const TypeP& t) {
  return shift_left_n(env, t, 1);
}

std::optional<TypeP> shift_right(const TypeEnv& env, const TypeP& t) {
  return shift_right_n(env, t, 1);
}

std::pair<uint64_t, TypeP> strip_next(const TypeEnv& env, const TypeP& t) {
  uint64_t n = 0;
  TypeP h = env.head(t);
  for (int guard = 0; h->kind == TK::Next && guard < kHeadGuard; ++guard) {
    n += h->n;
    h = env.head(h->a);
  }
  return {n, h};
}

bool patient(const TypeEnv& env, const TypeP& t, Side side) {
  auto [n, h] = strip_next(env, t);
  return h->kind == (side == Side::Box ? TK::Box : TK::Diamond);
}

}  // namespace tss
