#include <sstream>

#include "tss/syntax.h"

namespace tss {

namespace {

std::string pad(int n) { return std::string(static_cast<size_t>(n), ' '); }

std::string call_text(const Proc& p) {
  std::string s = p.chan + " <- " + p.callee;
  if (!p.args.empty()) {
    s += "[";
    for (size_t i = 0; i < p.args.size(); ++i) {
      if (i) s += ", ";
      s += to_string(p.args[i]);
    }
    s += "]";
  }
  if (!p.chans.empty()) {
    s += " <-";
    for (auto& c : p.chans) s += " " + c;
  }
  return s;
}

std::string marker(const Proc& p) {
  if (p.origin != Origin::Reconstructed) return "";
  return p.coerced.empty() ? " %@" : " %@ " + p.coerced;
}

void emit(const ProcP& p, int ind, std::ostringstream& o) {
  const Proc& q = *p;
  std::string in = pad(ind);
  switch (q.kind) {
    case PK::Spawn:
      o << in << call_text(q) << " ;" << marker(q) << "\n";
      emit(q.cont, ind, o);
      return;
    case PK::TailCall: o << in << call_text(q) << "\n"; return;
    case PK::Cut:
      o << in << q.chan << " : " << to_string(q.annot) << " <- (\n";
      emit(q.body, ind + 2, o);
      o << in << ") ;" << marker(q) << "\n";
      emit(q.cont, ind, o);
      return;
    case PK::Fwd: o << in << q.chan << " <- " << q.other << "\n"; return;
    case PK::SendLabel:
      o << in << q.chan << "." << q.label << " ;\n";
      emit(q.cont, ind, o);
      return;
    case PK::Case:
      o << in << "case " << q.chan << " (\n";
      for (size_t i = 0; i < q.branches.size(); ++i) {
        o << in << (i ? "| " : "  ") << q.branches[i].first << " =>\n";
        emit(q.branches[i].second, ind + 4, o);
      }
      o << in << ")\n";
      return;
    case PK::Close: o << in << "close " << q.chan << "\n"; return;
    case PK::Wait:
      o << in << "wait " << q.chan << " ;\n";
      emit(q.cont, ind, o);
      return;
    case PK::SendChan:
      o << in << "send " << q.chan << " " << q.other << " ;\n";
      emit(q.cont, ind, o);
      return;
    case PK::RecvChan:
      o << in << q.other << " <- recv " << q.chan << " ;\n";
      emit(q.cont, ind, o);
      return;
    case PK::Delay:
      if (q.origin == Origin::Tick) {
        for (uint64_t i = 0; i < q.count; ++i) o << in << "tick ;\n";
      } else if (q.count_expr) {
        o << in << "delay{" << to_string(q.count_expr) << "} ;" << marker(q) << "\n";
      } else if (q.count == 1) {
        o << in << "delay ;" << marker(q) << "\n";
      } else {
        o << in << "delay{" << q.count << "} ;" << marker(q) << "\n";
      }
      emit(q.cont, ind, o);
      return;
    case PK::When:
    case PK::Now:
      o << in << (q.kind == PK::When ? "when? " : "now! ") << q.chan << " ;"
        << marker(q) << "\n";
      emit(q.cont, ind, o);
      return;
  }
}

std::string pats_text(const std::vector<IndexPat>& ps) {
  if (ps.empty()) return "";
  std::string s = "[";
  for (size_t i = 0; i < ps.size(); ++i) {
    if (i) s += ", ";
    switch (ps[i].kind) {
      case IndexPat::Kind::Const: s += std::to_string(ps[i].k); break;
      case IndexPat::Kind::Var: s += ps[i].var; break;
      case IndexPat::Kind::Succ: s += ps[i].var + "+" + std::to_string(ps[i].k); break;
    }
  }
  return s + "]";
}

}  // namespace

std::string print_proc(const ProcP& p, int indent) {
  std::ostringstream o;
  emit(p, indent, o);
  return o.str();
}

std::string pretty_print(const Signature& sig) {
  std::ostringstream o;
  for (auto& t : sig.types)
    for (auto& c : t.clauses)
      o << "type " << t.name << pats_text(c.pats) << " = " << to_string(c.body) << "\n";
  for (auto& d : sig.decls) {
    o << "\n";
    for (auto& c : d.clauses) {
      o << "decl " << d.name << pats_text(c.pats) << " :";
      for (auto& x : c.ctx) o << " (" << x.name << " : " << to_string(x.type) << ")";
      o << " |- (" << c.offer.name << " : " << to_string(c.offer.type) << ")\n";
    }
    if (const ProcDef* def = sig.find_def(d.name)) {
      for (auto& c : def->clauses) {
        o << "proc " << c.dest << " <- " << d.name << pats_text(c.pats);
        if (!c.chans.empty()) {
          o << " <-";
          for (auto& y : c.chans) o << " " << y;
        }
        o << " =\n" << print_proc(c.body, 2);
      }
    }
  }
  return o.str();
}

}  // namespace tss
