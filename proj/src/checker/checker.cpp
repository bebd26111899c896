#include "tss/checker.h"

#include <algorithm>
#include <set>

#include "tss/subtyping.h"

namespace tss {

std::string show_sequent(const Context& ctx, const ChanDecl& offer) {
  std::string s;
  for (size_t i = 0; i < ctx.size(); ++i) {
    if (i) s += ", ";
    s += ctx[i].name + " : " + to_string(ctx[i].type);
  }
  if (!s.empty()) s += " ";
  return s + "|- " + offer.name + " : " + to_string(offer.type);
}

TypeError::TypeError(Pos p, std::string r, const std::string& msg, std::string e,
                     std::string f, std::string c)
    : std::runtime_error(msg),
      pos(p),
      rule(std::move(r)),
      expected(std::move(e)),
      found(std::move(f)),
      context(std::move(c)) {}

std::string TypeError::render() const {
  std::string s = std::to_string(pos.line) + ":" + std::to_string(pos.col) + ": ";
  if (!def.empty()) s += "in " + def + ": ";
  s += "[" + rule + "] " + what();
  if (!expected.empty()) s += "; expected " + expected;
  if (!found.empty()) s += ", found " + found;
  if (!context.empty()) s += "\n    at " + context;
  return s;
}

namespace {

class Checker {
 public:
  Checker(const TypeEnv& env, const CheckOptions& o) : env_(env), opts_(o) {}

  void check(Context ctx, const ProcP& p, ChanDecl off) {
    switch (p->kind) {
      case PK::SendLabel: return send_label(std::move(ctx), p, std::move(off));
      case PK::Case: return case_(std::move(ctx), p, std::move(off));
      case PK::Close:
        if (p->chan != off.name) fail(p, "1R", "close on a channel that is not offered", ctx, off);
        if (env_.head(off.type)->kind != TK::One)
          fail(p, "1R", "close at a non-unit type", ctx, off, "1", to_string(off.type));
        if (!ctx.empty()) fail(p, "1R", "unused linear channels remain", ctx, off, "empty context");
        return;
      case PK::Wait: {
        size_t i = used(ctx, p, off, "1L");
        if (env_.head(ctx[i].type)->kind != TK::One)
          fail(p, "1L", "wait at a non-unit type", ctx, off, "1", to_string(ctx[i].type));
        ctx.erase(ctx.begin() + static_cast<long>(i));
        return check(std::move(ctx), p->cont, std::move(off));
      }
      case PK::SendChan: return send_chan(std::move(ctx), p, std::move(off));
      case PK::RecvChan: return recv_chan(std::move(ctx), p, std::move(off));
      case PK::Fwd:
        if (p->chan != off.name) fail(p, "id", "forward must target the offered channel", ctx, off);
        if (ctx.size() != 1 || ctx[0].name != p->other)
          fail(p, "id", "forward needs exactly the source channel in context", ctx, off,
               p->other);
        if (!type_equal(env_, ctx[0].type, off.type))
          fail(p, "id", "forwarded types differ", ctx, off, to_string(off.type),
               to_string(ctx[0].type));
        return;
      case PK::Cut: return cut(std::move(ctx), p, std::move(off));
      case PK::Spawn:
      case PK::TailCall: return call(std::move(ctx), p, std::move(off));
      case PK::Delay: {
        uint64_t n = p->count_expr ? 0 : p->count;
        if (p->count_expr) fail(p, "○LR", "delay count is not ground", ctx, off);
        for (uint64_t k = 0; k < n; ++k) {
          for (auto& c : ctx) {
            auto s = shift_left(env_, c.type);
            if (!s)
              fail(p, "○LR", "[" + c.name + "]_L^-1 is undefined", ctx, off, "○A or □A",
                   to_string(c.type));
            c.type = *s;
          }
          auto s = shift_right(env_, off.type);
          if (!s)
            fail(p, "○LR", "[" + off.name + "]_R^-1 is undefined", ctx, off, "○A or ◇A",
                 to_string(off.type));
          off.type = *s;
        }
        return check(std::move(ctx), p->cont, std::move(off));
      }
      case PK::Now:
        if (p->chan == off.name) {
          TypeP h = env_.head(off.type);
          if (h->kind != TK::Diamond)
            fail(p, "◇R", "now! on an offered channel that is not ◇", ctx, off, "◇A",
                 to_string(off.type));
          off.type = h->a;
        } else {
          size_t i = used(ctx, p, off, "□L");
          TypeP h = env_.head(ctx[i].type);
          if (h->kind != TK::Box)
            fail(p, "□L", "now! on a used channel that is not □", ctx, off, "□A",
                 to_string(ctx[i].type));
          ctx[i].type = h->a;
        }
        return check(std::move(ctx), p->cont, std::move(off));
      case PK::When:
        if (p->chan == off.name) {
          TypeP h = env_.head(off.type);
          if (h->kind != TK::Box)
            fail(p, "□R", "when? on an offered channel that is not □", ctx, off, "□A",
                 to_string(off.type));
          for (auto& c : ctx)
            if (!patient(env_, c.type, Side::Box))
              fail(p, "□R", "context channel " + c.name + " is not delayed□", ctx, off,
                   "○*□A", to_string(c.type));
          off.type = h->a;
        } else {
          size_t i = used(ctx, p, off, "◇L");
          TypeP h = env_.head(ctx[i].type);
          if (h->kind != TK::Diamond)
            fail(p, "◇L", "when? on a used channel that is not ◇", ctx, off, "◇A",
                 to_string(ctx[i].type));
          for (size_t j = 0; j < ctx.size(); ++j)
            if (j != i && !patient(env_, ctx[j].type, Side::Box))
              fail(p, "◇L", "context channel " + ctx[j].name + " is not delayed□", ctx, off,
                   "○*□A", to_string(ctx[j].type));
          if (!patient(env_, off.type, Side::Diamond))
            fail(p, "◇L", "offered channel is not delayed◇", ctx, off, "○*◇A",
                 to_string(off.type));
          ctx[i].type = h->a;
        }
        return check(std::move(ctx), p->cont, std::move(off));
    }
  }

 private:
  const TypeEnv& env_;
  const CheckOptions& opts_;

  [[noreturn]] void fail(const ProcP& p, const std::string& rule, const std::string& msg,
                         const Context& ctx, const ChanDecl& off, std::string expected = "",
                         std::string found = "") {
    throw TypeError(p->pos, rule, msg, std::move(expected), std::move(found),
                    show_sequent(ctx, off));
  }

  static long find(const Context& ctx, const std::string& x) {
    for (size_t i = 0; i < ctx.size(); ++i)
      if (ctx[i].name == x) return static_cast<long>(i);
    return -1;
  }

  size_t used(const Context& ctx, const ProcP& p, const ChanDecl& off, const char* rule) {
    long i = find(ctx, p->chan);
    if (i < 0) fail(p, rule, "channel " + p->chan + " is not in context", ctx, off);
    return static_cast<size_t>(i);
  }

  void fresh(const Context& ctx, const ChanDecl& off, const ProcP& p, const std::string& x,
             const char* rule) {
    if (find(ctx, x) >= 0 || x == off.name)
      fail(p, rule, "channel " + x + " is already in scope", ctx, off);
  }

  static const TypeP* branch(const TypeP& h, const std::string& l) {
    for (auto& [m, t] : h->branches)
      if (m == l) return &t;
    return nullptr;
  }

  void send_label(Context ctx, const ProcP& p, ChanDecl off) {
    if (p->chan == off.name) {
      TypeP h = env_.head(off.type);
      if (h->kind != TK::Plus)
        fail(p, "⊕R", "label sent on an offered channel without ⊕", ctx, off, "+{...}",
             to_string(off.type));
      const TypeP* b = branch(h, p->label);
      if (!b) fail(p, "⊕R", "label " + p->label + " not in branch set", ctx, off, to_string(h));
      off.type = *b;
    } else {
      size_t i = used(ctx, p, off, "&L");
      TypeP h = env_.head(ctx[i].type);
      if (h->kind != TK::With)
        fail(p, "&L", "label sent on a used channel without &", ctx, off, "&{...}",
             to_string(ctx[i].type));
      const TypeP* b = branch(h, p->label);
      if (!b) fail(p, "&L", "label " + p->label + " not in branch set", ctx, off, to_string(h));
      ctx[i].type = *b;
    }
    check(std::move(ctx), p->cont, std::move(off));
  }

  void branches_match(const ProcP& p, const TypeP& h, const char* rule, const Context& ctx,
                      const ChanDecl& off) {
    for (auto& [l, t] : h->branches) {
      bool found = false;
      for (auto& [m, q] : p->branches) found = found || m == l;
      if (!found) fail(p, rule, "missing branch for label " + l, ctx, off, to_string(h));
    }
    for (auto& [m, q] : p->branches)
      if (!branch(h, m)) fail(p, rule, "label " + m + " not in branch set", ctx, off, to_string(h));
  }

  void case_(Context ctx, const ProcP& p, ChanDecl off) {
    if (p->chan == off.name) {
      TypeP h = env_.head(off.type);
      if (h->kind != TK::With)
        fail(p, "&R", "case on an offered channel without &", ctx, off, "&{...}",
             to_string(off.type));
      branches_match(p, h, "&R", ctx, off);
      for (auto& [l, q] : p->branches) {
        ChanDecl o = off;
        o.type = *branch(h, l);
        check(ctx, q, o);
      }
    } else {
      size_t i = used(ctx, p, off, "⊕L");
      TypeP h = env_.head(ctx[i].type);
      if (h->kind != TK::Plus)
        fail(p, "⊕L", "case on a used channel without ⊕", ctx, off, "+{...}",
             to_string(ctx[i].type));
      branches_match(p, h, "⊕L", ctx, off);
      for (auto& [l, q] : p->branches) {
        Context c = ctx;
        c[i].type = *branch(h, l);
        check(std::move(c), q, off);
      }
    }
  }

  void send_chan(Context ctx, const ProcP& p, ChanDecl off) {
    long j = find(ctx, p->other);
    if (j < 0 || p->other == p->chan)
      fail(p, p->chan == off.name ? "⊗R" : "⊸L", "payload " + p->other + " is not in context",
           ctx, off);
    TypeP payload = ctx[static_cast<size_t>(j)].type;
    if (p->chan == off.name) {
      TypeP h = env_.head(off.type);
      if (h->kind != TK::Tensor)
        fail(p, "⊗R", "send on an offered channel without ⊗", ctx, off, "A * B",
             to_string(off.type));
      if (!type_equal(env_, payload, h->a))
        fail(p, "⊗R", "payload type mismatch", ctx, off, to_string(h->a), to_string(payload));
      ctx.erase(ctx.begin() + j);
      off.type = h->b;
    } else {
      size_t i = used(ctx, p, off, "⊸L");
      TypeP h = env_.head(ctx[i].type);
      if (h->kind != TK::Lolli)
        fail(p, "⊸L", "send on a used channel without ⊸", ctx, off, "A -o B",
             to_string(ctx[i].type));
      if (!type_equal(env_, payload, h->a))
        fail(p, "⊸L", "payload type mismatch", ctx, off, to_string(h->a), to_string(payload));
      ctx[i].type = h->b;
      ctx.erase(ctx.begin() + j);
    }
    check(std::move(ctx), p->cont, std::move(off));
  }

  void recv_chan(Context ctx, const ProcP& p, ChanDecl off) {
    const char* rule = p->chan == off.name ? "⊸R" : "⊗L";
    fresh(ctx, off, p, p->other, rule);
    if (p->chan == off.name) {
      TypeP h = env_.head(off.type);
      if (h->kind != TK::Lolli)
        fail(p, "⊸R", "receive on an offered channel without ⊸", ctx, off, "A -o B",
             to_string(off.type));
      ctx.push_back({p->other, h->a});
      off.type = h->b;
    } else {
      size_t i = used(ctx, p, off, "⊗L");
      TypeP h = env_.head(ctx[i].type);
      if (h->kind != TK::Tensor)
        fail(p, "⊗L", "receive on a used channel without ⊗", ctx, off, "A * B",
             to_string(ctx[i].type));
      ctx[i].type = h->b;
      ctx.push_back({p->other, h->a});
    }
    check(std::move(ctx), p->cont, std::move(off));
  }

  void cut(Context ctx, const ProcP& p, ChanDecl off) {
    fresh(ctx, off, p, p->chan, "cut");
    std::set<std::string> fv;
    for (auto& c : free_channels(p->body))
      if (c != p->chan) fv.insert(c);
    if (fv.count(off.name)) fail(p, "cut", "cut body uses the offered channel", ctx, off);
    Context left, right;
    for (auto& c : ctx) (fv.count(c.name) ? left : right).push_back(c);
    for (auto& c : fv)
      if (find(ctx, c) < 0) fail(p, "cut", "channel " + c + " is not in context", ctx, off);
    check(std::move(left), p->body, {p->chan, p->annot});
    right.push_back({p->chan, p->annot});
    check(std::move(right), p->cont, std::move(off));
  }

  bool arg_ok(const TypeP& actual, const TypeP& declared) {
    if (type_equal(env_, actual, declared)) return true;
    return opts_.call_subtyping && is_subtype(env_, actual, declared);
  }

  void call(Context ctx, const ProcP& p, ChanDecl off) {
    const ProcDecl* d = env_.sig().find_decl(p->callee);
    if (!d || d->clauses.empty())
      fail(p, "def", "unknown process " + p->callee, ctx, off);
    const DeclClause& dc = d->clauses[0];
    if (dc.ctx.size() != p->chans.size())
      fail(p, "def", "wrong number of channel arguments to " + p->callee, ctx, off,
           std::to_string(dc.ctx.size()), std::to_string(p->chans.size()));
    std::set<std::string> seen;
    for (size_t k = 0; k < p->chans.size(); ++k) {
      const std::string& y = p->chans[k];
      long i = find(ctx, y);
      if (i < 0 || !seen.insert(y).second)
        fail(p, "def", "argument " + y + " is not available", ctx, off);
      if (!arg_ok(ctx[static_cast<size_t>(i)].type, dc.ctx[k].type))
        fail(p, "def", "argument " + y + " has the wrong type", ctx, off,
             to_string(dc.ctx[k].type), to_string(ctx[static_cast<size_t>(i)].type));
    }
    Context rest;
    for (auto& c : ctx)
      if (!seen.count(c.name)) rest.push_back(c);
    if (p->kind == PK::TailCall) {
      if (p->chan != off.name) fail(p, "def", "tail call must target the offered channel", ctx, off);
      if (!rest.empty()) fail(p, "def", "unused linear channels remain", ctx, off);
      bool ok = type_equal(env_, dc.offer.type, off.type) ||
                (opts_.call_subtyping && is_subtype(env_, dc.offer.type, off.type));
      if (!ok)
        fail(p, "def", "offered type of " + p->callee + " does not match", ctx, off,
             to_string(off.type), to_string(dc.offer.type));
      return;
    }
    fresh(ctx, off, p, p->chan, "def");
    rest.push_back({p->chan, dc.offer.type});
    check(std::move(rest), p->cont, std::move(off));
  }
};

}  // namespace

std::optional<TypeError> check_process(const TypeEnv& env, const Context& ctx,
                                       const ProcP& p, const ChanDecl& offer,
                                       const CheckOptions& opts) {
  try {
    Checker(env, opts).check(ctx, p, offer);
  } catch (TypeError& e) {
    return e;
  }
  return std::nullopt;
}

std::pair<Context, ChanDecl> definition_interface(const Signature& sig,
                                                  const std::string& name) {
  const ProcDecl* d = sig.find_decl(name);
  const ProcDef* f = sig.find_def(name);
  if (!d || !f || d->clauses.empty() || f->clauses.empty())
    throw std::out_of_range("no ground definition " + name);
  const DeclClause& dc = d->clauses[0];
  const DefClause& fc = f->clauses[0];
  if (dc.ctx.size() != fc.chans.size())
    throw TypeError(fc.pos, "def", "definition of " + name + " binds the wrong number of channels",
                    std::to_string(dc.ctx.size()), std::to_string(fc.chans.size()), "");
  Context ctx;
  for (size_t i = 0; i < dc.ctx.size(); ++i) ctx.push_back({fc.chans[i], dc.ctx[i].type});
  std::set<std::string> names{fc.dest};
  for (auto& c : ctx)
    if (!names.insert(c.name).second)
      throw TypeError(fc.pos, "def", "channel " + c.name + " bound twice", "", "", "");
  return {ctx, ChanDecl{fc.dest, dc.offer.type}};
}

static std::optional<TypeError> check_def(const TypeEnv& env, const ProcDef& def,
                                          const CheckOptions& opts) {
  std::optional<TypeError> err;
  try {
    auto [ctx, off] = definition_interface(env.sig(), def.name);
    err = check_process(env, ctx, def.clauses[0].body, off, opts);
  } catch (TypeError& e) {
    err = e;
  } catch (std::exception& e) {
    err = TypeError(def.clauses[0].pos, "def", e.what(), "", "", "");
  }
  if (err) err->def = def.name;
  return err;
}

std::vector<TypeError> check_signature(const TypeEnv& env, const CheckOptions& opts) {
  std::vector<TypeError> out;
  for (auto& def : env.sig().defs)
    if (auto e = check_def(env, def, opts)) out.push_back(*e);
  return out;
}

std::vector<TypeError> check_signature_omp(const TypeEnv& env, const CheckOptions& opts) {
  const auto& defs = env.sig().defs;
  std::vector<std::optional<TypeError>> res(defs.size());
  const long n = static_cast<long>(defs.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) res[i] = check_def(env, defs[i], opts);
  std::vector<TypeError> out;
  for (auto& r : res)
    if (r) out.push_back(*r);
  return out;
}

}  // namespace tss
