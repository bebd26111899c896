#include "tss/reconstruct.h"

#include <set>
#include <unordered_set>

#include "tss/cost.h"
#include "tss/subtyping.h"

namespace tss {

namespace {

enum class Move { DiaR, BoxL, Next, BoxR, DiaL };

struct Budget {};

void collect_names(const ProcP& p, std::set<std::string>& out) {
  if (!p) return;
  for (auto* s : {&p->chan, &p->other})
    if (!s->empty()) out.insert(*s);
  for (auto& c : p->chans) out.insert(c);
  collect_names(p->body, out);
  collect_names(p->cont, out);
  for (auto& [l, b] : p->branches) collect_names(b, out);
}

bool has_explicit_temporal(const ProcP& p) {
  if (!p) return false;
  if (p->kind == PK::When || p->kind == PK::Now) return true;
  if (p->kind == PK::Delay && p->origin != Origin::Tick) return true;
  if (has_explicit_temporal(p->body) || has_explicit_temporal(p->cont)) return true;
  for (auto& [l, b] : p->branches)
    if (has_explicit_temporal(b)) return true;
  return false;
}

ProcP with_origin(ProcP p, Origin o, const std::string& coerced = "") {
  Proc q = *p;
  q.origin = o;
  q.coerced = coerced;
  return std::make_shared<const Proc>(std::move(q));
}

class Elaborator {
 public:
  Elaborator(const TypeEnv& env, const ReconstructOptions& o, std::set<std::string> names)
      : env_(env), opts_(o), names_(std::move(names)) {}

  ProcP run(const Context& ctx, const ChanDecl& off, const ProcP& p) {
    return elab(ctx, off, p);
  }

  const std::string& deepest() const { return deepest_; }

 private:
  const TypeEnv& env_;
  const ReconstructOptions& opts_;
  std::set<std::string> names_;
  std::unordered_set<std::string> path_, failed_;
  size_t nodes_ = 0, cuts_ = 0, depth_ = 0, best_depth_ = 0;
  std::string deepest_;

  static long find(const Context& ctx, const std::string& x) {
    for (size_t i = 0; i < ctx.size(); ++i)
      if (ctx[i].name == x) return static_cast<long>(i);
    return -1;
  }

  static std::string key(const Context& ctx, const ChanDecl& off, const ProcP& p) {
    std::string k = std::to_string(reinterpret_cast<uintptr_t>(p.get()));
    for (auto& c : ctx) k += "|" + c.name + ":" + to_string(c.type);
    return k + "|" + off.name + ":" + to_string(off.type);
  }

  ProcP elab(const Context& ctx, const ChanDecl& off, const ProcP& p) {
    if (++nodes_ > opts_.node_budget) throw Budget{};
    std::string k = key(ctx, off, p);
    if (failed_.count(k)) return nullptr;
    if (path_.count(k)) {
      ++cuts_;
      return nullptr;
    }
    ++depth_;
    if (depth_ > best_depth_ || deepest_.empty()) {
      best_depth_ = depth_;
      std::string head = print_proc(p);
      head = head.substr(0, head.find('\n'));
      deepest_ = show_sequent(ctx, off) + "  at: " + head;
    }
    path_.insert(k);
    size_t cuts_before = cuts_;
    ProcP r = attempt(ctx, off, p);
    path_.erase(k);
    --depth_;
    if (!r && cuts_ == cuts_before) failed_.insert(k);
    return r;
  }

  static bool structural(PK k) {
    return k == PK::SendLabel || k == PK::Case || k == PK::Close || k == PK::Wait ||
           k == PK::SendChan || k == PK::RecvChan;
  }

  static TK needed(PK k, bool right) {
    switch (k) {
      case PK::SendLabel: return right ? TK::Plus : TK::With;
      case PK::Case: return right ? TK::With : TK::Plus;
      case PK::Close:
      case PK::Wait: return TK::One;
      case PK::SendChan: return right ? TK::Tensor : TK::Lolli;
      case PK::RecvChan: return right ? TK::Lolli : TK::Tensor;
      default: return TK::Name;
    }
  }

  ProcP attempt(const Context& ctx, const ChanDecl& off, const ProcP& p) {
    std::vector<std::pair<Move, std::string>> moves;
    bool allow_next = true;
    if (structural(p->kind)) {
      bool right = p->chan == off.name;
      long i = find(ctx, p->chan);
      if (!right && i < 0) return nullptr;
      if (right && (p->kind == PK::Wait)) return nullptr;
      if (!right && p->kind == PK::Close) return nullptr;
      TypeP t = right ? off.type : ctx[static_cast<size_t>(i)].type;
      TypeP h = env_.head(t);
      if (h->kind == needed(p->kind, right)) return direct(ctx, off, p);
      if (h->kind != TK::Next && h->kind != TK::Box && h->kind != TK::Diamond) return nullptr;
      if (right) {
        if (h->kind == TK::Diamond) moves.push_back({Move::DiaR, off.name});
        if (h->kind == TK::Box) moves.push_back({Move::BoxR, off.name});
      } else {
        if (h->kind == TK::Box) moves.push_back({Move::BoxL, p->chan});
        if (h->kind == TK::Diamond) moves.push_back({Move::DiaL, p->chan});
      }
    } else {
      if (ProcP r = direct(ctx, off, p)) return r;
      if (p->kind == PK::Fwd && (p->chan != off.name || ctx.size() != 1 ||
                                 ctx[0].name != p->other))
        return nullptr;
      allow_next = !(p->kind == PK::Delay);
    }
    if (env_.head(off.type)->kind == TK::Diamond) moves.push_back({Move::DiaR, off.name});
    for (auto& c : ctx)
      if (env_.head(c.type)->kind == TK::Box) moves.push_back({Move::BoxL, c.name});
    if (allow_next) moves.push_back({Move::Next, ""});
    if (env_.head(off.type)->kind == TK::Box) moves.push_back({Move::BoxR, off.name});
    for (auto& c : ctx)
      if (env_.head(c.type)->kind == TK::Diamond) moves.push_back({Move::DiaL, c.name});
    std::set<std::pair<Move, std::string>> tried;
    for (auto& m : moves) {
      if (!tried.insert(m).second) continue;
      if (ProcP r = apply(m.first, m.second, ctx, off, p)) return r;
    }
    return nullptr;
  }

  ProcP apply(Move m, const std::string& z, Context ctx, ChanDecl off, const ProcP& p) {
    switch (m) {
      case Move::DiaR: {
        TypeP h = env_.head(off.type);
        if (h->kind != TK::Diamond) return nullptr;
        off.type = h->a;
        ProcP r = elab(ctx, off, p);
        return r ? p_now(off.name, r, Origin::Reconstructed, p->pos) : nullptr;
      }
      case Move::BoxL: {
        size_t i = static_cast<size_t>(find(ctx, z));
        TypeP h = env_.head(ctx[i].type);
        if (h->kind != TK::Box) return nullptr;
        ctx[i].type = h->a;
        ProcP r = elab(ctx, off, p);
        return r ? p_now(z, r, Origin::Reconstructed, p->pos) : nullptr;
      }
      case Move::BoxR: {
        TypeP h = env_.head(off.type);
        if (h->kind != TK::Box) return nullptr;
        for (auto& c : ctx)
          if (!patient(env_, c.type, Side::Box)) return nullptr;
        off.type = h->a;
        ProcP r = elab(ctx, off, p);
        return r ? p_when(off.name, r, Origin::Reconstructed, p->pos) : nullptr;
      }
      case Move::DiaL: {
        size_t i = static_cast<size_t>(find(ctx, z));
        TypeP h = env_.head(ctx[i].type);
        if (h->kind != TK::Diamond) return nullptr;
        for (size_t j = 0; j < ctx.size(); ++j)
          if (j != i && !patient(env_, ctx[j].type, Side::Box)) return nullptr;
        if (!patient(env_, off.type, Side::Diamond)) return nullptr;
        ctx[i].type = h->a;
        ProcP r = elab(ctx, off, p);
        return r ? p_when(z, r, Origin::Reconstructed, p->pos) : nullptr;
      }
      case Move::Next: {
        if (!shift_all(ctx, off, true)) return nullptr;
        ProcP r = elab(ctx, off, p);
        if (!r) return nullptr;
        if (r->kind == PK::Delay && r->origin == Origin::Reconstructed) {
          Proc q = *r;
          q.count += 1;
          return std::make_shared<const Proc>(std::move(q));
        }
        return p_delay(1, Origin::Reconstructed, r, p->pos);
      }
    }
    return nullptr;
  }

  bool shift_all(Context& ctx, ChanDecl& off, bool need_progress) {
    bool progress = env_.head(off.type)->kind == TK::Next;
    for (auto& c : ctx) {
      progress = progress || env_.head(c.type)->kind == TK::Next;
      auto s = shift_left(env_, c.type);
      if (!s) return false;
      c.type = *s;
    }
    auto s = shift_right(env_, off.type);
    if (!s) return false;
    off.type = *s;
    return progress || !need_progress;
  }

  static const TypeP* branch(const TypeP& h, const std::string& l) {
    for (auto& [m, t] : h->branches)
      if (m == l) return &t;
    return nullptr;
  }

  ProcP direct(Context ctx, ChanDecl off, const ProcP& p) {
    bool right = p->chan == off.name;
    long i = find(ctx, p->chan);
    switch (p->kind) {
      case PK::SendLabel: {
        TypeP h = env_.head(right ? off.type : ctx[static_cast<size_t>(i)].type);
        const TypeP* b = branch(h, p->label);
        if (!b) return nullptr;
        (right ? off.type : ctx[static_cast<size_t>(i)].type) = *b;
        ProcP r = elab(ctx, off, p->cont);
        return r ? with_cont(p, r) : nullptr;
      }
      case PK::Case: {
        TypeP h = env_.head(right ? off.type : ctx[static_cast<size_t>(i)].type);
        if (h->branches.size() != p->branches.size()) return nullptr;
        Proc q = *p;
        for (auto& [l, body] : q.branches) {
          const TypeP* b = branch(h, l);
          if (!b) return nullptr;
          Context c = ctx;
          ChanDecl o = off;
          (right ? o.type : c[static_cast<size_t>(i)].type) = *b;
          body = elab(c, o, body);
          if (!body) return nullptr;
        }
        return std::make_shared<const Proc>(std::move(q));
      }
      case PK::Close: return ctx.empty() ? p : nullptr;
      case PK::Wait: {
        ctx.erase(ctx.begin() + i);
        ProcP r = elab(ctx, off, p->cont);
        return r ? with_cont(p, r) : nullptr;
      }
      case PK::SendChan: {
        long j = find(ctx, p->other);
        if (j < 0 || p->other == p->chan) return nullptr;
        TypeP h = env_.head(right ? off.type : ctx[static_cast<size_t>(i)].type);
        TypeP payload = ctx[static_cast<size_t>(j)].type;
        if (!type_equal(env_, payload, h->a)) {
          TypeP ph = env_.head(payload);
          if (ph->kind != TK::Box) return nullptr;
          ctx[static_cast<size_t>(j)].type = ph->a;
          ProcP r = elab(ctx, off, p);
          return r ? p_now(p->other, r, Origin::Reconstructed, p->pos) : nullptr;
        }
        if (right) off.type = h->b;
        else ctx[static_cast<size_t>(i)].type = h->b;
        ctx.erase(ctx.begin() + j);
        ProcP r = elab(ctx, off, p->cont);
        return r ? with_cont(p, r) : nullptr;
      }
      case PK::RecvChan: {
        if (find(ctx, p->other) >= 0 || p->other == off.name) return nullptr;
        TypeP h = env_.head(right ? off.type : ctx[static_cast<size_t>(i)].type);
        if (right) off.type = h->b;
        else ctx[static_cast<size_t>(i)].type = h->b;
        ctx.push_back({p->other, h->a});
        ProcP r = elab(ctx, off, p->cont);
        return r ? with_cont(p, r) : nullptr;
      }
      case PK::Fwd:
        if (right && ctx.size() == 1 && ctx[0].name == p->other &&
            type_equal(env_, ctx[0].type, off.type))
          return p;
        return nullptr;
      case PK::Delay: {
        if (!shift_all(ctx, off, false)) return nullptr;
        ProcP r = elab(ctx, off, p->cont);
        return r ? with_cont(p, r) : nullptr;
      }
      case PK::Cut: return cut(std::move(ctx), std::move(off), p);
      case PK::Spawn:
      case PK::TailCall: return call(std::move(ctx), std::move(off), p);
      default: return nullptr;
    }
  }

  ProcP cut(Context ctx, ChanDecl off, const ProcP& p) {
    if (find(ctx, p->chan) >= 0 || p->chan == off.name) return nullptr;
    std::set<std::string> fv;
    for (auto& c : free_channels(p->body))
      if (c != p->chan) fv.insert(c);
    if (fv.count(off.name)) return nullptr;
    Context left, right;
    for (auto& c : ctx) (fv.count(c.name) ? left : right).push_back(c);
    if (left.size() != fv.size()) return nullptr;
    ProcP body = elab(left, {p->chan, p->annot}, p->body);
    if (!body) return nullptr;
    right.push_back({p->chan, p->annot});
    ProcP cont = elab(right, off, p->cont);
    if (!cont) return nullptr;
    Proc q = *p;
    q.body = body;
    q.cont = cont;
    return std::make_shared<const Proc>(std::move(q));
  }

  std::string fresh(const std::string& base) {
    std::string n = base + "'";
    while (names_.count(n)) n += "'";
    names_.insert(n);
    return n;
  }

  ProcP coercion(const std::string& src, const TypeP& a, const std::string& dst,
                 const TypeP& b) {
    if (!is_subtype(env_, a, b)) return nullptr;
    Elaborator sub(env_, opts_, {src, dst});
    return sub.run({{src, a}}, {dst, b}, p_fwd(dst, src));
  }

  ProcP call(Context ctx, ChanDecl off, const ProcP& p) {
    const ProcDecl* d = env_.sig().find_decl(p->callee);
    if (!d || d->clauses.empty()) return nullptr;
    const DeclClause& dc = d->clauses[0];
    if (dc.ctx.size() != p->chans.size()) return nullptr;
    struct Coerce {
      std::string orig, fresh;
      TypeP declared;
      ProcP body;
    };
    std::vector<Coerce> coerced;
    std::vector<std::string> args;
    std::set<std::string> seen;
    for (size_t k = 0; k < p->chans.size(); ++k) {
      const std::string& y = p->chans[k];
      long i = find(ctx, y);
      if (i < 0 || !seen.insert(y).second) return nullptr;
      const TypeP& actual = ctx[static_cast<size_t>(i)].type;
      if (type_equal(env_, actual, dc.ctx[k].type)) {
        args.push_back(y);
        continue;
      }
      std::string y2 = fresh(y);
      ProcP body = coercion(y, actual, y2, dc.ctx[k].type);
      if (!body) return nullptr;
      coerced.push_back({y, y2, dc.ctx[k].type, body});
      args.push_back(y2);
    }
    Context rest;
    for (auto& c : ctx)
      if (!seen.count(c.name)) rest.push_back(c);
    ProcP result;
    if (p->kind == PK::TailCall) {
      if (p->chan != off.name || !rest.empty()) return nullptr;
      if (type_equal(env_, dc.offer.type, off.type)) {
        result = p_tail(p->chan, p->callee, p->args, args, p->pos);
      } else {
        std::string x2 = fresh(p->chan);
        ProcP body = coercion(x2, dc.offer.type, p->chan, off.type);
        if (!body) return nullptr;
        result = with_origin(p_spawn(x2, p->callee, p->args, args, body, p->pos),
                             Origin::Reconstructed, p->chan);
      }
    } else {
      if (find(rest, p->chan) >= 0 || p->chan == off.name || seen.count(p->chan)) return nullptr;
      rest.push_back({p->chan, dc.offer.type});
      ProcP cont = elab(rest, off, p->cont);
      if (!cont) return nullptr;
      result = p_spawn(p->chan, p->callee, p->args, args, cont, p->pos);
    }
    for (auto it = coerced.rbegin(); it != coerced.rend(); ++it)
      result = with_origin(p_cut(it->fresh, it->declared, it->body, result, p->pos),
                           Origin::Reconstructed, it->orig);
    return result;
  }
};

TypeP erase_type(const TypeP& t) {
  switch (t->kind) {
    case TK::Next:
    case TK::Box:
    case TK::Diamond: return erase_type(t->a);
    case TK::Plus:
    case TK::With: {
      std::vector<std::pair<std::string, TypeP>> bs;
      for (auto& [l, b] : t->branches) bs.emplace_back(l, erase_type(b));
      return t->kind == TK::Plus ? t_plus(std::move(bs)) : t_with(std::move(bs));
    }
    case TK::Tensor: return t_tensor(erase_type(t->a), erase_type(t->b));
    case TK::Lolli: return t_lolli(erase_type(t->a), erase_type(t->b));
    default: return t;
  }
}

ProcP erase_proc_types(const ProcP& p) {
  if (!p) return p;
  Proc q = *p;
  if (q.annot) q.annot = erase_type(q.annot);
  q.body = erase_proc_types(p->body);
  q.cont = erase_proc_types(p->cont);
  for (auto& [l, b] : q.branches) b = erase_proc_types(b);
  return std::make_shared<const Proc>(std::move(q));
}

Signature erase_signature_types(const Signature& sig) {
  Signature out;
  out.types = sig.types;
  for (auto& t : out.types)
    for (auto& c : t.clauses) c.body = erase_type(c.body);
  out.decls = sig.decls;
  for (auto& d : out.decls)
    for (auto& c : d.clauses) {
      for (auto& x : c.ctx) x.type = erase_type(x.type);
      c.offer.type = erase_type(c.offer.type);
    }
  return out;
}

// Checks the untimed skeleton; returns the error if it is ill-typed.
std::optional<TypeError> skeleton_error(const TypeEnv& env, const Context& ctx,
                                        const ProcP& p, const ChanDecl& off) {
  try {
    TypeEnv erased(erase_signature_types(env.sig()));
    Context c;
    for (auto& x : ctx) c.push_back({x.name, erase_type(x.type)});
    return check_process(erased, c, erase_proc_types(erase_ticks(p)),
                         {off.name, erase_type(off.type)});
  } catch (std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

TypeP erase_modalities(const TypeP& t) { return erase_type(t); }

ProcP elaborate_process(const TypeEnv& env, const Context& ctx, const ProcP& p,
                        const ChanDecl& offer, const ReconstructOptions& opts) {
  if (has_explicit_temporal(p))
    throw TypeError(p->pos, "implicit",
                    "reconstruction input must not contain delay, when? or now!", "", "",
                    show_sequent(ctx, offer));
  std::set<std::string> names{offer.name};
  for (auto& c : ctx) names.insert(c.name);
  collect_names(p, names);
  Elaborator e(env, opts, names);
  ProcP r;
  try {
    r = e.run(ctx, offer, p);
  } catch (Budget&) {
    throw ReconstructionError(p->pos, "search budget exceeded", e.deepest());
  }
  if (r) return r;
  if (auto err = skeleton_error(env, ctx, p, offer)) throw *err;
  throw ReconstructionError(p->pos, "no placement of delay, when? and now! satisfies the temporal types",
                            e.deepest());
}

Signature elaborate_signature(const TypeEnv& env, std::vector<ElabError>* errors,
                              const ReconstructOptions& opts) {
  Signature out = env.sig();
  for (auto& def : out.defs) {
    DefClause& c = def.clauses[0];
    try {
      auto [ctx, off] = definition_interface(env.sig(), def.name);
      c.body = elaborate_process(env, ctx, c.body, off, opts);
    } catch (TypeError& e) {
      if (errors) errors->push_back({ElabError::Kind::Type, def.name, e.pos, e.render()});
    } catch (ReconstructionError& e) {
      if (errors)
        errors->push_back({ElabError::Kind::Reconstruction, def.name, e.pos,
                           std::string(e.what()) + "; deepest goal: " + e.deepest_goal});
    }
  }
  return out;
}

bool implicit_forward_ok(const TypeEnv& env, const TypeP& a, const TypeP& b) {
  ReconstructOptions opts;
  Elaborator e(env, opts, {"x", "y"});
  try {
    return e.run({{"y", a}}, {"x", b}, p_fwd("x", "y")) != nullptr;
  } catch (Budget&) {
    return false;
  }
}

ProcP erase_reconstructed(const ProcP& p) {
  if (!p) return p;
  if (p->origin == Origin::Reconstructed) {
    switch (p->kind) {
      case PK::Delay:
      case PK::When:
      case PK::Now: return erase_reconstructed(p->cont);
      case PK::Cut: return rename(erase_reconstructed(p->cont), p->chan, p->coerced);
      case PK::Spawn: return p_tail(p->coerced, p->callee, p->args, p->chans, p->pos);
      default: break;
    }
  }
  Proc q = *p;
  q.body = erase_reconstructed(p->body);
  q.cont = erase_reconstructed(p->cont);
  for (auto& [l, b] : q.branches) b = erase_reconstructed(b);
  return std::make_shared<const Proc>(std::move(q));
}

Signature erase_reconstructed(const Signature& sig) {
  Signature out = sig;
  for (auto& d : out.defs)
    for (auto& c : d.clauses) c.body = erase_reconstructed(c.body);
  return out;
}

}  // namespace tss
