#include <algorithm>
#include <deque>
#include <set>

#include "tss/syntax.h"

namespace tss {

std::string mangle(const std::string& name, const std::vector<uint64_t>& args) {
  std::string s = name;
  for (auto a : args) s += "$" + std::to_string(a);
  return s;
}

namespace {

bool match(const std::vector<IndexPat>& pats, const std::vector<uint64_t>& vals,
           Binding& b) {
  if (pats.size() != vals.size()) return false;
  b.clear();
  for (size_t i = 0; i < pats.size(); ++i) {
    const IndexPat& p = pats[i];
    switch (p.kind) {
      case IndexPat::Kind::Const:
        if (vals[i] != p.k) return false;
        break;
      case IndexPat::Kind::Var: b[p.var] = vals[i]; break;
      case IndexPat::Kind::Succ:
        if (vals[i] < p.k) return false;
        b[p.var] = vals[i] - p.k;
        break;
    }
  }
  return true;
}

std::string show_call(const std::string& n, const std::vector<uint64_t>& v) {
  std::string s = n + "[";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

class Instantiator {
 public:
  explicit Instantiator(const Signature& sig) : sig_(sig) {}

  std::string type_instance(const std::string& name, const std::vector<uint64_t>& vals) {
    std::string m = mangle(name, vals);
    if (types_done_.insert(m).second) work_.push_back({true, name, vals});
    return m;
  }

  std::string proc_instance(const std::string& name, const std::vector<uint64_t>& vals) {
    std::string m = mangle(name, vals);
    if (procs_done_.insert(m).second) work_.push_back({false, name, vals});
    return m;
  }

  void drain() {
    while (!work_.empty()) {
      Item it = work_.front();
      work_.pop_front();
      if (it.is_type) build_type(it.name, it.vals);
      else build_proc(it.name, it.vals);
    }
  }

  Signature finish() {
    auto key = [&](const std::string& n, bool type) -> size_t {
      if (type) {
        for (size_t i = 0; i < sig_.types.size(); ++i)
          if (sig_.types[i].name == n && sig_.types[i].arity() == 0) return i;
      } else {
        for (size_t i = 0; i < sig_.decls.size(); ++i)
          if (sig_.decls[i].name == n && sig_.decls[i].arity() == 0) return i;
      }
      return SIZE_MAX;
    };
    std::stable_sort(out_.types.begin(), out_.types.end(),
                     [&](auto& a, auto& b) { return key(a.name, true) < key(b.name, true); });
    std::stable_sort(out_.decls.begin(), out_.decls.end(),
                     [&](auto& a, auto& b) { return key(a.name, false) < key(b.name, false); });
    std::stable_sort(out_.defs.begin(), out_.defs.end(),
                     [&](auto& a, auto& b) { return key(a.name, false) < key(b.name, false); });
    return std::move(out_);
  }

  TypeP ground(const TypeP& t, const Binding& b) {
    switch (t->kind) {
      case TK::One: return t;
      case TK::Plus:
      case TK::With: {
        std::vector<std::pair<std::string, TypeP>> bs;
        for (auto& [l, x] : t->branches) bs.emplace_back(l, ground(x, b));
        return t->kind == TK::Plus ? t_plus(std::move(bs)) : t_with(std::move(bs));
      }
      case TK::Tensor: return t_tensor(ground(t->a, b), ground(t->b, b));
      case TK::Lolli: return t_lolli(ground(t->a, b), ground(t->b, b));
      case TK::Next:
        return t_next(t->count ? eval(t->count, b) : t->n, ground(t->a, b));
      case TK::Box: return t_box(ground(t->a, b));
      case TK::Diamond: return t_dia(ground(t->a, b));
      case TK::Name: {
        std::vector<uint64_t> vals;
        for (auto& e : t->args) vals.push_back(eval(e, b));
        return t_name(type_instance(t->name, vals));
      }
    }
    return t;
  }

  ProcP ground(const ProcP& p, const Binding& b) {
    if (!p) return p;
    Proc q = *p;
    if (q.kind == PK::Spawn || q.kind == PK::TailCall) {
      std::vector<uint64_t> vals;
      for (auto& e : q.args) vals.push_back(eval(e, b));
      q.callee = proc_instance(q.callee, vals);
      q.args.clear();
    }
    if (q.kind == PK::Delay && q.count_expr) {
      q.count = eval(q.count_expr, b);
      q.count_expr = nullptr;
      if (q.count == 0) return ground(p->cont, b);
    }
    if (q.annot) q.annot = ground(q.annot, b);
    q.body = ground(p->body, b);
    q.cont = ground(p->cont, b);
    for (auto& [l, x] : q.branches) x = ground(x, b);
    return std::make_shared<const Proc>(std::move(q));
  }

 private:
  struct Item {
    bool is_type;
    std::string name;
    std::vector<uint64_t> vals;
  };
  const Signature& sig_;
  Signature out_;
  std::set<std::string> types_done_, procs_done_;
  std::deque<Item> work_;

  void build_type(const std::string& name, const std::vector<uint64_t>& vals) {
    const TypeDef* d = sig_.find_type(name);
    if (!d) throw EvalError("unknown type " + name);
    Binding b;
    for (auto& c : d->clauses) {
      if (!match(c.pats, vals, b)) continue;
      TypeClause g;
      g.pos = c.pos;
      g.body = ground(c.body, b);
      out_.types.push_back({mangle(name, vals), {g}});
      return;
    }
    throw EvalError("no clause of type " + name + " matches " + show_call(name, vals));
  }

  void build_proc(const std::string& name, const std::vector<uint64_t>& vals) {
    const ProcDecl* d = sig_.find_decl(name);
    if (!d) throw EvalError("unknown process " + name);
    Binding b;
    bool found = false;
    for (auto& c : d->clauses) {
      if (!match(c.pats, vals, b)) continue;
      DeclClause g;
      g.pos = c.pos;
      for (auto& x : c.ctx) g.ctx.push_back({x.name, ground(x.type, b)});
      g.offer = {c.offer.name, ground(c.offer.type, b)};
      out_.decls.push_back({mangle(name, vals), {g}});
      found = true;
      break;
    }
    if (!found)
      throw EvalError("no declaration clause of " + name + " matches " + show_call(name, vals));
    const ProcDef* def = sig_.find_def(name);
    if (!def) return;
    for (auto& c : def->clauses) {
      if (!match(c.pats, vals, b)) continue;
      DefClause g;
      g.pos = c.pos;
      g.dest = c.dest;
      g.chans = c.chans;
      g.body = ground(c.body, b);
      out_.defs.push_back({mangle(name, vals), {g}});
      return;
    }
    throw EvalError("no clause of process " + name + " matches " + show_call(name, vals));
  }
};

}  // namespace

std::vector<std::string> param_names(const Signature& sig, const std::string& def) {
  std::vector<std::vector<IndexPat>> rows;
  if (auto* d = sig.find_decl(def))
    for (auto& c : d->clauses) rows.push_back(c.pats);
  else if (auto* t = sig.find_type(def))
    for (auto& c : t->clauses) rows.push_back(c.pats);
  else
    throw EvalError("unknown definition " + def);
  if (rows.empty()) return {};
  std::vector<std::string> names(rows[0].size());
  for (size_t i = 0; i < names.size(); ++i) {
    for (auto& r : rows)
      if (r[i].kind == IndexPat::Kind::Var) {
        names[i] = r[i].var;
        break;
      }
    if (names[i].empty())
      for (auto& r : rows)
        if (r[i].kind == IndexPat::Kind::Succ) {
          names[i] = r[i].var;
          break;
        }
  }
  return names;
}

Signature instantiate_call(const Signature& sig, const std::string& name,
                           const std::vector<uint64_t>& args, std::string* root) {
  Instantiator in(sig);
  std::string m;
  if (sig.find_decl(name)) m = in.proc_instance(name, args);
  else if (sig.find_type(name)) m = in.type_instance(name, args);
  else throw EvalError("unknown definition " + name);
  in.drain();
  if (root) *root = m;
  return in.finish();
}

Signature instantiate(const Signature& sig, const std::string& def,
                      const Binding& binding) {
  std::vector<uint64_t> vals;
  for (auto& n : param_names(sig, def)) {
    auto it = binding.find(n);
    if (n.empty() || it == binding.end())
      throw EvalError("binding for " + def + " lacks parameter " + (n.empty() ? "?" : n));
    vals.push_back(it->second);
  }
  return instantiate_call(sig, def, vals, nullptr);
}

Signature ground_all(const Signature& sig) {
  Instantiator in(sig);
  for (auto& t : sig.types)
    if (t.arity() == 0) in.type_instance(t.name, {});
  for (auto& d : sig.decls)
    if (d.arity() == 0) in.proc_instance(d.name, {});
  in.drain();
  return in.finish();
}

}  // namespace tss
