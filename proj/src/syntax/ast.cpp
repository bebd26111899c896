#include "tss/syntax.h"

#include <algorithm>
#include <functional>
#include <set>

namespace tss {

PExprP pconst(uint64_t v) {
  auto e = std::make_shared<ParamExpr>();
  e->kind = ParamExpr::Kind::Const;
  e->value = v;
  return e;
}

PExprP pvar(std::string name) {
  auto e = std::make_shared<ParamExpr>();
  e->kind = ParamExpr::Kind::Var;
  e->var = std::move(name);
  return e;
}

static PExprP pbin(ParamExpr::Kind k, PExprP a, PExprP b) {
  auto e = std::make_shared<ParamExpr>();
  e->kind = k;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

PExprP padd(PExprP a, PExprP b) { return pbin(ParamExpr::Kind::Add, a, b); }
PExprP pmul(PExprP a, PExprP b) { return pbin(ParamExpr::Kind::Mul, a, b); }

bool pexpr_ground(const PExprP& e) {
  switch (e->kind) {
    case ParamExpr::Kind::Const: return true;
    case ParamExpr::Kind::Var: return false;
    default: return pexpr_ground(e->lhs) && pexpr_ground(e->rhs);
  }
}

uint64_t eval(const PExprP& e, const Binding& b) {
  switch (e->kind) {
    case ParamExpr::Kind::Const: return e->value;
    case ParamExpr::Kind::Var: {
      auto it = b.find(e->var);
      if (it == b.end()) throw EvalError("unbound parameter " + e->var);
      return it->second;
    }
    case ParamExpr::Kind::Add: return eval(e->lhs, b) + eval(e->rhs, b);
    case ParamExpr::Kind::Mul: return eval(e->lhs, b) * eval(e->rhs, b);
  }
  return 0;
}

static std::string pexpr_str(const PExprP& e, int prec) {
  switch (e->kind) {
    case ParamExpr::Kind::Const: return std::to_string(e->value);
    case ParamExpr::Kind::Var: return e->var;
    case ParamExpr::Kind::Add: {
      std::string s = pexpr_str(e->lhs, 0) + "+" + pexpr_str(e->rhs, 1);
      return prec > 0 ? "(" + s + ")" : s;
    }
    case ParamExpr::Kind::Mul:
      return pexpr_str(e->lhs, 1) + "*" + pexpr_str(e->rhs, 2);
  }
  return "";
}

std::string to_string(const PExprP& e) { return pexpr_str(e, 0); }

bool pexpr_equal(const PExprP& a, const PExprP& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case ParamExpr::Kind::Const: return a->value == b->value;
    case ParamExpr::Kind::Var: return a->var == b->var;
    default: return pexpr_equal(a->lhs, b->lhs) && pexpr_equal(a->rhs, b->rhs);
  }
}

// ---- types

static TypeP mk(Type t) { return std::make_shared<const Type>(std::move(t)); }

TypeP t_one() {
  static const TypeP one = mk(Type{});
  return one;
}

TypeP t_plus(std::vector<std::pair<std::string, TypeP>> bs) {
  Type t;
  t.kind = TK::Plus;
  t.branches = std::move(bs);
  return mk(std::move(t));
}

TypeP t_with(std::vector<std::pair<std::string, TypeP>> bs) {
  Type t;
  t.kind = TK::With;
  t.branches = std::move(bs);
  return mk(std::move(t));
}

TypeP t_tensor(TypeP a, TypeP b) {
  Type t;
  t.kind = TK::Tensor;
  t.a = std::move(a);
  t.b = std::move(b);
  return mk(std::move(t));
}

TypeP t_lolli(TypeP a, TypeP b) {
  Type t;
  t.kind = TK::Lolli;
  t.a = std::move(a);
  t.b = std::move(b);
  return mk(std::move(t));
}

TypeP t_next(uint64_t n, TypeP a) {
  if (n == 0) return a;
  if (a->kind == TK::Next && !a->count) return t_next(n + a->n, a->a);
  Type t;
  t.kind = TK::Next;
  t.n = n;
  t.a = std::move(a);
  return mk(std::move(t));
}

TypeP t_next_sym(PExprP count, TypeP a) {
  if (pexpr_ground(count)) return t_next(eval(count, {}), std::move(a));
  if (a->kind == TK::Next) {
    PExprP inner = a->count ? a->count : pconst(a->n);
    return t_next_sym(padd(count, inner), a->a);
  }
  Type t;
  t.kind = TK::Next;
  t.count = std::move(count);
  t.a = std::move(a);
  return mk(std::move(t));
}

TypeP t_box(TypeP a) {
  Type t;
  t.kind = TK::Box;
  t.a = std::move(a);
  return mk(std::move(t));
}

TypeP t_dia(TypeP a) {
  Type t;
  t.kind = TK::Diamond;
  t.a = std::move(a);
  return mk(std::move(t));
}

TypeP t_name(std::string name, std::vector<PExprP> args) {
  Type t;
  t.kind = TK::Name;
  t.name = std::move(name);
  t.args = std::move(args);
  return mk(std::move(t));
}

bool type_ground(const TypeP& t) {
  switch (t->kind) {
    case TK::One: return true;
    case TK::Plus:
    case TK::With:
      for (auto& [l, b] : t->branches)
        if (!type_ground(b)) return false;
      return true;
    case TK::Tensor:
    case TK::Lolli: return type_ground(t->a) && type_ground(t->b);
    case TK::Next: return !t->count && type_ground(t->a);
    case TK::Box:
    case TK::Diamond: return type_ground(t->a);
    case TK::Name: return t->args.empty();
  }
  return false;
}

bool same_type(const TypeP& a, const TypeP& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TK::One: return true;
    case TK::Plus:
    case TK::With:
      if (a->branches.size() != b->branches.size()) return false;
      for (size_t i = 0; i < a->branches.size(); ++i)
        if (a->branches[i].first != b->branches[i].first ||
            !same_type(a->branches[i].second, b->branches[i].second))
          return false;
      return true;
    case TK::Tensor:
    case TK::Lolli: return same_type(a->a, b->a) && same_type(a->b, b->b);
    case TK::Next:
      if (a->count || b->count) {
        if (!a->count || !b->count || !pexpr_equal(a->count, b->count))
          return false;
      } else if (a->n != b->n) {
        return false;
      }
      return same_type(a->a, b->a);
    case TK::Box:
    case TK::Diamond: return same_type(a->a, b->a);
    case TK::Name:
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!pexpr_equal(a->args[i], b->args[i])) return false;
      return true;
  }
  return false;
}

static size_t mix(size_t h, size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

size_t type_hash(const TypeP& t) {
  size_t h = static_cast<size_t>(t->kind);
  switch (t->kind) {
    case TK::One: break;
    case TK::Plus:
    case TK::With:
      for (auto& [l, b] : t->branches)
        h = mix(mix(h, std::hash<std::string>{}(l)), type_hash(b));
      break;
    case TK::Tensor:
    case TK::Lolli: h = mix(mix(h, type_hash(t->a)), type_hash(t->b)); break;
    case TK::Next: h = mix(mix(h, t->n), type_hash(t->a)); break;
    case TK::Box:
    case TK::Diamond: h = mix(h, type_hash(t->a)); break;
    case TK::Name: h = mix(h, std::hash<std::string>{}(t->name)); break;
  }
  return h;
}

static void type_str(const TypeP& t, bool operand, std::string& out);

static void prefix_operand(const TypeP& t, std::string& out) {
  bool binary = t->kind == TK::Tensor || t->kind == TK::Lolli;
  if (binary) out += "(";
  type_str(t, false, out);
  if (binary) out += ")";
}

static void type_str(const TypeP& t, bool operand, std::string& out) {
  switch (t->kind) {
    case TK::One: out += "1"; return;
    case TK::Plus:
    case TK::With: {
      out += t->kind == TK::Plus ? "+{ " : "&{ ";
      for (size_t i = 0; i < t->branches.size(); ++i) {
        if (i) out += ", ";
        out += t->branches[i].first + " : ";
        type_str(t->branches[i].second, false, out);
      }
      out += " }";
      return;
    }
    case TK::Tensor:
    case TK::Lolli: {
      if (operand) out += "(";
      bool lbin = t->a->kind == TK::Tensor || t->a->kind == TK::Lolli;
      if (lbin) out += "(";
      type_str(t->a, false, out);
      if (lbin) out += ")";
      out += t->kind == TK::Tensor ? " * " : " -o ";
      type_str(t->b, false, out);
      if (operand) out += ")";
      return;
    }
    case TK::Next:
      if (t->count) out += "()^{" + to_string(t->count) + "} ";
      else if (t->n == 1) out += "()";
      else out += "()^" + std::to_string(t->n) + " ";
      prefix_operand(t->a, out);
      return;
    case TK::Box: out += "[]"; prefix_operand(t->a, out); return;
    case TK::Diamond: out += "<>"; prefix_operand(t->a, out); return;
    case TK::Name:
      out += t->name;
      if (!t->args.empty()) {
        out += "[";
        for (size_t i = 0; i < t->args.size(); ++i) {
          if (i) out += ", ";
          out += to_string(t->args[i]);
        }
        out += "]";
      }
      return;
  }
}

std::string to_string(const TypeP& t) {
  std::string s;
  type_str(t, false, s);
  return s;
}

// ---- processes

static ProcP mkp(Proc p) { return std::make_shared<const Proc>(std::move(p)); }

ProcP p_spawn(std::string x, std::string f, std::vector<PExprP> args,
              std::vector<std::string> ys, ProcP cont, Pos pos) {
  Proc p;
  p.kind = PK::Spawn;
  p.chan = std::move(x);
  p.callee = std::move(f);
  p.args = std::move(args);
  p.chans = std::move(ys);
  p.cont = std::move(cont);
  p.pos = pos;
  return mkp(std::move(p));
}

ProcP p_tail(std::string x, std::string f, std::vector<PExprP> args,
             std::vector<std::string> ys, Pos pos) {
  Proc p;
  p.kind = PK::TailCall;
  p.chan = std::move(x);
  p.callee = std::move(f);
  p.args = std::move(args);
  p.chans = std::move(ys);
  p.pos = pos;
  return mkp(std::move(p));
}

ProcP p_cut(std::string x, TypeP t, ProcP body, ProcP cont, Pos pos) {
  Proc p;
  p.kind = PK::Cut;
  p.chan = std::move(x);
  p.annot = std::move(t);
  p.body = std::move(body);
  p.cont = std::move(cont);
  p.pos = pos;
  return mkp(std::move(p));
}

ProcP p_fwd(std::string x, std::string y, Pos pos) {
  Proc p;
  p.kind = PK::Fwd;
  p.chan = std::move(x);
  p.other = std::move(y);
  p.pos = pos;
  return mkp(std::move(p));
}

ProcP p_send_label(std::string x, std::string l, ProcP cont, Pos pos) {
  Proc p;
  p.kind = PK::SendLabel;
  p.chan = std::move(x);
  p.label = std::move(l);
  p.cont = std::move(cont);
  p.pos = pos;
  return mkp(std::move(p));
}

ProcP p_case(std::string x, std::vector<std::pair<std::string, ProcP>> bs,
             Pos pos) {
  Proc p;
  p.kind = PK::Case;
  p.chan = std::move(x);
  p.branches = std::move(bs);
  p.pos = pos;
  return mkp(std::move(p));
}

ProcP p_close(std::string x, Pos pos) {
  Proc p;
  p.kind = PK::Close;
  p.chan = std::move(x);
  p.pos = pos;
  return mkp(std::move(p));
}

ProcP p_wait(std::string x, ProcP cont, Pos pos) {
  Proc p;
  p.kind = PK::Wait;
  p.chan = std::move(x);
  p.cont = std::move(cont);
  p.pos = pos;
  return mkp(std::move(p));
}

ProcP p_send(std::string x, std::string y, ProcP cont, Pos pos) {
  Proc p;
  p.kind = PK::SendChan;
  p.chan = std::move(x);
  p.other = std::move(y);
  p.cont = std::move(cont);
  p.pos = pos;
  return mkp(std::move(p));
}

ProcP p_recv(std::string y, std::string x, ProcP cont, Pos pos) {
  Proc p;
  p.kind = PK::RecvChan;
  p.chan = std::move(x);
  p.other = std::move(y);
  p.cont = std::move(cont);
  p.pos = pos;
  return mkp(std::move(p));
}

ProcP p_delay(uint64_t n, Origin o, ProcP cont, Pos pos) {
  Proc p;
  p.kind = PK::Delay;
  p.count = n;
  p.origin = o;
  p.cont = std::move(cont);
  p.pos = pos;
  return mkp(std::move(p));
}

ProcP p_when(std::string x, ProcP cont, Origin o, Pos pos) {
  Proc p;
  p.kind = PK::When;
  p.chan = std::move(x);
  p.cont = std::move(cont);
  p.origin = o;
  p.pos = pos;
  return mkp(std::move(p));
}

ProcP p_now(std::string x, ProcP cont, Origin o, Pos pos) {
  Proc p;
  p.kind = PK::Now;
  p.chan = std::move(x);
  p.cont = std::move(cont);
  p.origin = o;
  p.pos = pos;
  return mkp(std::move(p));
}

ProcP with_cont(const ProcP& p, ProcP cont) {
  Proc q = *p;
  q.cont = std::move(cont);
  return mkp(std::move(q));
}

bool same_proc(const ProcP& a, const ProcP& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->chan != b->chan || a->other != b->other ||
      a->label != b->label || a->callee != b->callee || a->chans != b->chans ||
      a->origin != b->origin || a->coerced != b->coerced)
    return false;
  if (a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!pexpr_equal(a->args[i], b->args[i])) return false;
  if (a->kind == PK::Delay) {
    if (bool(a->count_expr) != bool(b->count_expr)) return false;
    if (a->count_expr ? !pexpr_equal(a->count_expr, b->count_expr)
                      : a->count != b->count)
      return false;
  }
  if (bool(a->annot) != bool(b->annot)) return false;
  if (a->annot && !same_type(a->annot, b->annot)) return false;
  if (!same_proc(a->body, b->body) || !same_proc(a->cont, b->cont)) return false;
  if (a->branches.size() != b->branches.size()) return false;
  for (size_t i = 0; i < a->branches.size(); ++i)
    if (a->branches[i].first != b->branches[i].first ||
        !same_proc(a->branches[i].second, b->branches[i].second))
      return false;
  return true;
}

static std::string sub(const std::string& s, const std::string& from,
                       const std::string& to) {
  return s == from ? to : s;
}

ProcP rename(const ProcP& p, const std::string& from, const std::string& to) {
  if (!p || from == to) return p;
  Proc q = *p;
  switch (p->kind) {
    case PK::Spawn:
      for (auto& c : q.chans) c = sub(c, from, to);
      if (p->chan != from) q.cont = rename(p->cont, from, to);
      break;
    case PK::TailCall:
      q.chan = sub(q.chan, from, to);
      for (auto& c : q.chans) c = sub(c, from, to);
      break;
    case PK::Cut:
      if (p->chan != from) {
        q.body = rename(p->body, from, to);
        q.cont = rename(p->cont, from, to);
      }
      break;
    case PK::Fwd:
      q.chan = sub(q.chan, from, to);
      q.other = sub(q.other, from, to);
      break;
    case PK::SendLabel:
    case PK::Wait:
    case PK::When:
    case PK::Now:
      q.chan = sub(q.chan, from, to);
      q.cont = rename(p->cont, from, to);
      break;
    case PK::Case:
      q.chan = sub(q.chan, from, to);
      for (auto& [l, b] : q.branches) b = rename(b, from, to);
      break;
    case PK::Close: q.chan = sub(q.chan, from, to); break;
    case PK::SendChan:
      q.chan = sub(q.chan, from, to);
      q.other = sub(q.other, from, to);
      q.cont = rename(p->cont, from, to);
      break;
    case PK::RecvChan:
      q.chan = sub(q.chan, from, to);
      if (p->other != from) q.cont = rename(p->cont, from, to);
      break;
    case PK::Delay: q.cont = rename(p->cont, from, to); break;
  }
  return mkp(std::move(q));
}

static void free_rec(const ProcP& p, std::set<std::string>& bound,
                     std::vector<std::string>& out) {
  auto use = [&](const std::string& c) {
    if (!bound.count(c) && std::find(out.begin(), out.end(), c) == out.end())
      out.push_back(c);
  };
  auto under = [&](const std::string& x, const ProcP& q) {
    bool fresh = bound.insert(x).second;
    free_rec(q, bound, out);
    if (fresh) bound.erase(x);
  };
  switch (p->kind) {
    case PK::Spawn:
      for (auto& c : p->chans) use(c);
      under(p->chan, p->cont);
      break;
    case PK::TailCall:
      use(p->chan);
      for (auto& c : p->chans) use(c);
      break;
    case PK::Cut: {
      bool fresh = bound.insert(p->chan).second;
      free_rec(p->body, bound, out);
      free_rec(p->cont, bound, out);
      if (fresh) bound.erase(p->chan);
      break;
    }
    case PK::Fwd: use(p->chan); use(p->other); break;
    case PK::SendLabel:
    case PK::Wait:
    case PK::When:
    case PK::Now:
      use(p->chan);
      free_rec(p->cont, bound, out);
      break;
    case PK::Case:
      use(p->chan);
      for (auto& [l, b] : p->branches) free_rec(b, bound, out);
      break;
    case PK::Close: use(p->chan); break;
    case PK::SendChan:
      use(p->chan);
      use(p->other);
      free_rec(p->cont, bound, out);
      break;
    case PK::RecvChan:
      use(p->chan);
      under(p->other, p->cont);
      break;
    case PK::Delay: free_rec(p->cont, bound, out); break;
  }
}

std::vector<std::string> free_channels(const ProcP& p) {
  std::set<std::string> bound;
  std::vector<std::string> out;
  free_rec(p, bound, out);
  return out;
}

// ---- signatures

const TypeDef* Signature::find_type(const std::string& n) const {
  for (auto& t : types)
    if (t.name == n) return &t;
  return nullptr;
}

const ProcDecl* Signature::find_decl(const std::string& n) const {
  for (auto& d : decls)
    if (d.name == n) return &d;
  return nullptr;
}

const ProcDef* Signature::find_def(const std::string& n) const {
  for (auto& d : defs)
    if (d.name == n) return &d;
  return nullptr;
}

bool Signature::ground() const {
  for (auto& t : types)
    if (t.arity()) return false;
  for (auto& d : decls)
    if (d.arity()) return false;
  return true;
}

static bool same_pats(const std::vector<IndexPat>& a,
                      const std::vector<IndexPat>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].kind != b[i].kind || a[i].var != b[i].var || a[i].k != b[i].k)
      return false;
  return true;
}

static bool same_chan(const ChanDecl& a, const ChanDecl& b) {
  return a.name == b.name && same_type(a.type, b.type);
}

bool same_signature(const Signature& a, const Signature& b) {
  if (a.types.size() != b.types.size() || a.decls.size() != b.decls.size() ||
      a.defs.size() != b.defs.size())
    return false;
  for (size_t i = 0; i < a.types.size(); ++i) {
    auto &x = a.types[i], &y = b.types[i];
    if (x.name != y.name || x.clauses.size() != y.clauses.size()) return false;
    for (size_t j = 0; j < x.clauses.size(); ++j)
      if (!same_pats(x.clauses[j].pats, y.clauses[j].pats) ||
          !same_type(x.clauses[j].body, y.clauses[j].body))
        return false;
  }
  for (size_t i = 0; i < a.decls.size(); ++i) {
    auto &x = a.decls[i], &y = b.decls[i];
    if (x.name != y.name || x.clauses.size() != y.clauses.size()) return false;
    for (size_t j = 0; j < x.clauses.size(); ++j) {
      auto &c = x.clauses[j], &d = y.clauses[j];
      if (!same_pats(c.pats, d.pats) || c.ctx.size() != d.ctx.size() ||
          !same_chan(c.offer, d.offer))
        return false;
      for (size_t k = 0; k < c.ctx.size(); ++k)
        if (!same_chan(c.ctx[k], d.ctx[k])) return false;
    }
  }
  for (auto& x : a.defs) {
    const ProcDef* yp = b.find_def(x.name);
    if (!yp) return false;
    auto& y = *yp;
    if (x.clauses.size() != y.clauses.size()) return false;
    for (size_t j = 0; j < x.clauses.size(); ++j) {
      auto &c = x.clauses[j], &d = y.clauses[j];
      if (!same_pats(c.pats, d.pats) || c.dest != d.dest || c.chans != d.chans ||
          !same_proc(c.body, d.body))
        return false;
    }
  }
  return true;
}

ParseError::ParseError(Pos p, const std::string& msg, std::vector<std::string> exp)
    : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.col) +
                         ": " + msg),
      pos(p),
      expected(std::move(exp)) {}

}  // namespace tss
