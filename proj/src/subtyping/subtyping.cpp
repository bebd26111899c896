#include <unordered_set>

#include "tss/subtyping.h"

namespace tss {

namespace {

using PairSet = std::unordered_set<std::pair<TypeP, TypeP>, TypePairHash, TypePairEq>;

class Subtyper {
 public:
  Subtyper(const TypeEnv& env, const SubtypeOptions& o) : env_(env), opts_(o) {}

  bool sub(const TypeP& A, const TypeP& B) {
    if (type_equal(env_, A, B)) return note("refl");
    std::pair<TypeP, TypeP> goal{A, B};
    if (proved_.count(goal)) return true;
    if (failed_.count(goal)) return false;
    if (path_.count(goal)) {
      ++cuts_;
      return false;
    }
    if (++goals_ > opts_.goal_budget) throw BudgetExceeded("subtyping exceeded its goal budget");
    path_.insert(goal);
    size_t cuts_before = cuts_;
    bool r = step(A, B);
    path_.erase(goal);
    if (r) proved_.insert(goal);
    else if (cuts_ == cuts_before) failed_.insert(goal);
    return r;
  }

 private:
  const TypeEnv& env_;
  const SubtypeOptions& opts_;
  PairSet path_, proved_, failed_;
  size_t goals_ = 0, cuts_ = 0;

  bool note(const char* rule) {
    if (opts_.trace) opts_.trace->push_back(rule);
    return true;
  }

  static TypeP dec(const TypeP& next) { return t_next(next->n - 1, next->a); }

  bool step(const TypeP& A, const TypeP& B) {
    TypeP a = env_.head(A), b = env_.head(B);
    if (a->kind == TK::Next && b->kind == TK::Next)
      return sub(dec(a), dec(b)) && note("○○");
    if (b->kind == TK::Box && patient(env_, a, Side::Box))
      return sub(A, b->a) && note("□R");
    if (a->kind == TK::Diamond && patient(env_, b, Side::Diamond))
      return sub(a->a, B) && note("◇L");
    if (a->kind == TK::Box && b->kind == TK::Next) {
      if (sub(A, dec(b))) return note("□○");
      return sub(a->a, B) && note("□L");
    }
    if (a->kind == TK::Next && b->kind == TK::Diamond) {
      if (sub(dec(a), B)) return note("○◇");
      return sub(A, b->a) && note("◇R");
    }
    if (a->kind == TK::Box && sub(a->a, B)) return note("□L");
    if (b->kind == TK::Diamond && sub(A, b->a)) return note("◇R");
    return false;
  }
};

}  // namespace

bool is_subtype(const TypeEnv& env, const TypeP& a, const TypeP& b,
                const SubtypeOptions& opts) {
  return Subtyper(env, opts).sub(a, b);
}

bool is_weak_subtype(const TypeEnv& env, const TypeP& a, const TypeP& b) {
  if (type_equal(env, a, b)) return true;
  auto [m, x] = strip_next(env, a);
  auto [n, y] = strip_next(env, b);
  if (x->kind != y->kind || !type_equal(env, x, y)) return false;
  if (x->kind == TK::Box) return m <= n;
  if (x->kind == TK::Diamond) return m >= n;
  return false;
}

}  // namespace tss
