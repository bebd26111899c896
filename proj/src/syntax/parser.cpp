#include <cctype>
#include <set>

#include "tss/syntax.h"

namespace tss {

namespace {

enum class Tok { Ident, Num, Sym, Kw, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Pos pos;
  bool marked = false;  // followed by a `%@` comment on the same line
  std::string mark;
};

const std::set<std::string> kKeywords = {
    "type", "decl", "proc", "case", "close", "wait", "send", "recv",
    "delay", "tick", "when?", "now!"};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' ||
         c == '$';
}

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;
  auto adv = [&](size_t n) {
    for (size_t k = 0; k < n && i < s.size(); ++k, ++i) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '%') {
      size_t e = s.find('\n', i);
      if (e == std::string::npos) e = s.size();
      if (i + 1 < s.size() && s[i + 1] == '@' && !out.empty()) {
        std::string m = s.substr(i + 2, e - i - 2);
        size_t b = m.find_first_not_of(" \t\r");
        size_t en = m.find_last_not_of(" \t\r");
        out.back().marked = true;
        out.back().mark = b == std::string::npos ? "" : m.substr(b, en - b + 1);
      }
      adv(e - i);
      continue;
    }
    Token t;
    t.pos = {line, col};
    if (ident_start(c)) {
      size_t j = i + 1;
      while (j < s.size() && ident_char(s[j])) ++j;
      t.text = s.substr(i, j - i);
      if ((t.text == "when" && j < s.size() && s[j] == '?') ||
          (t.text == "now" && j < s.size() && s[j] == '!')) {
        t.text += s[j];
        ++j;
      }
      t.kind = kKeywords.count(t.text) ? Tok::Kw : Tok::Ident;
      adv(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      t.kind = Tok::Num;
      t.text = s.substr(i, j - i);
      adv(j - i);
    } else {
      static const char* two[] = {"()", "[]", "<>", "<-", "-o", "|-", "=>"};
      t.kind = Tok::Sym;
      for (auto* p : two)
        if (s.compare(i, 2, p) == 0) t.text = p;
      if (t.text.empty()) {
        if (std::string("()[]{}+&*:;,.|=^").find(c) == std::string::npos)
          throw ParseError(t.pos, std::string("unexpected character '") + c + "'");
        t.text = std::string(1, c);
      }
      adv(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = {line, col};
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(lex(text)) {}

  Signature program() {
    Signature sig;
    while (peek().kind != Tok::End) {
      if (is_kw("type")) type_item(sig);
      else if (is_kw("decl")) decl_item(sig);
      else if (is_kw("proc")) proc_item(sig);
      else fail("expected a definition", {"type", "decl", "proc"});
    }
    resolve(sig);
    return sig;
  }

  TypeP lone_type() {
    open_scope_ = false;
    TypeP t = type();
    if (peek().kind != Tok::End) fail("trailing input after type", {"end of input"});
    return t;
  }

 private:
  std::vector<Token> toks_;
  size_t k_ = 0;
  std::set<std::string> params_;  // pattern variables of the current clause
  bool open_scope_ = true;        // false: any parameter name is accepted
  struct NameUse {
    std::string name;
    size_t arity;
    Pos pos;
  };
  std::vector<NameUse> type_uses_;

  const Token& peek(size_t d = 0) const {
    return toks_[std::min(k_ + d, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[k_];
    if (k_ + 1 < toks_.size()) ++k_;
    return t;
  }
  const Token& prev() const { return toks_[k_ - 1]; }
  bool is_sym(const char* s, size_t d = 0) const {
    return peek(d).kind == Tok::Sym && peek(d).text == s;
  }
  bool is_kw(const char* s) const {
    return peek().kind == Tok::Kw && peek().text == s;
  }
  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> exp) {
    std::string m = msg;
    const Token& t = peek();
    m += t.kind == Tok::End ? " at end of input" : " near '" + t.text + "'";
    if (!exp.empty()) {
      m += " (expected one of:";
      for (auto& e : exp) m += " " + e;
      m += ")";
    }
    throw ParseError(t.pos, m, std::move(exp));
  }
  void expect(const char* s) {
    if (!is_sym(s)) fail("syntax error", {s});
    next();
  }
  void expect_kw(const char* s) {
    if (!is_kw(s)) fail("syntax error", {s});
    next();
  }
  std::string ident(const char* what = "identifier") {
    if (peek().kind != Tok::Ident) fail("syntax error", {what});
    return next().text;
  }
  uint64_t number() {
    if (peek().kind != Tok::Num) fail("syntax error", {"number"});
    return std::stoull(next().text);
  }

  // ---- index expressions and patterns

  PExprP pexpr() {
    PExprP e = pterm();
    while (is_sym("+")) {
      next();
      e = padd(e, pterm());
    }
    return e;
  }
  PExprP pterm() {
    PExprP e = pfactor();
    while (is_sym("*")) {
      next();
      e = pmul(e, pfactor());
    }
    return e;
  }
  PExprP pfactor() {
    if (peek().kind == Tok::Num) return pconst(number());
    if (peek().kind == Tok::Ident) {
      const Token& t = next();
      if (open_scope_ && !params_.count(t.text))
        throw ParseError(t.pos, "unbound parameter '" + t.text + "'");
      return pvar(t.text);
    }
    if (is_sym("(")) {
      next();
      PExprP e = pexpr();
      expect(")");
      return e;
    }
    fail("syntax error in index expression", {"number", "parameter", "("});
  }

  std::vector<IndexPat> patterns() {
    std::vector<IndexPat> ps;
    params_.clear();
    if (!is_sym("[")) return ps;
    next();
    while (true) {
      IndexPat p;
      if (peek().kind == Tok::Num) {
        p.kind = IndexPat::Kind::Const;
        p.k = number();
      } else {
        const Token& t = peek();
        p.var = ident("pattern");
        if (!params_.insert(p.var).second)
          throw ParseError(t.pos, "duplicate parameter '" + p.var + "'");
        if (is_sym("+")) {
          next();
          p.kind = IndexPat::Kind::Succ;
          p.k = number();
        }
      }
      ps.push_back(p);
      if (is_sym(",")) {
        next();
        continue;
      }
      expect("]");
      break;
    }
    return ps;
  }

  // ---- types

  TypeP type() {
    TypeP l = prefix_type();
    if (is_sym("*")) {
      next();
      return t_tensor(l, type());
    }
    if (is_sym("-o")) {
      next();
      return t_lolli(l, type());
    }
    return l;
  }

  TypeP prefix_type() {
    if (is_sym("()")) {
      next();
      if (is_sym("^")) {
        next();
        if (is_sym("{")) {
          next();
          PExprP e = pexpr();
          expect("}");
          return t_next_sym(e, prefix_type());
        }
        uint64_t n = number();
        return t_next(n, prefix_type());
      }
      return t_next(1, prefix_type());
    }
    if (is_sym("[]")) {
      next();
      return t_box(prefix_type());
    }
    if (is_sym("<>")) {
      next();
      return t_dia(prefix_type());
    }
    return atom_type();
  }

  TypeP atom_type() {
    const Token& t = peek();
    if (t.kind == Tok::Num && t.text == "1") {
      next();
      return t_one();
    }
    if (is_sym("+") || is_sym("&")) {
      bool plus = next().text == "+";
      expect("{");
      std::vector<std::pair<std::string, TypeP>> bs;
      std::set<std::string> seen;
      while (true) {
        const Token& lt = peek();
        std::string l = ident("label");
        if (!seen.insert(l).second)
          throw ParseError(lt.pos, "duplicate label '" + l + "'");
        expect(":");
        bs.emplace_back(l, type());
        if (is_sym(",")) {
          next();
          continue;
        }
        expect("}");
        break;
      }
      return plus ? t_plus(std::move(bs)) : t_with(std::move(bs));
    }
    if (t.kind == Tok::Ident) {
      Pos p = t.pos;
      std::string n = next().text;
      std::vector<PExprP> args;
      if (is_sym("[")) {
        next();
        args.push_back(pexpr());
        while (is_sym(",")) {
          next();
          args.push_back(pexpr());
        }
        expect("]");
      }
      type_uses_.push_back({n, args.size(), p});
      return t_name(n, std::move(args));
    }
    if (is_sym("(")) {
      next();
      TypeP inner = type();
      expect(")");
      return inner;
    }
    fail("syntax error in type", {"1", "+{", "&{", "()", "[]", "<>", "name", "("});
  }

  // ---- processes

  ProcP proc() {
    const Token& t = peek();
    Pos pos = t.pos;
    if (t.kind == Tok::Kw) {
      if (t.text == "case") {
        next();
        std::string x = ident("channel");
        expect("(");
        std::vector<std::pair<std::string, ProcP>> bs;
        std::set<std::string> seen;
        while (true) {
          const Token& lt = peek();
          std::string l = ident("label");
          if (!seen.insert(l).second)
            throw ParseError(lt.pos, "duplicate branch '" + l + "'");
          expect("=>");
          bs.emplace_back(l, proc());
          if (is_sym("|")) {
            next();
            continue;
          }
          expect(")");
          break;
        }
        return p_case(x, std::move(bs), pos);
      }
      if (t.text == "close") {
        next();
        return p_close(ident("channel"), pos);
      }
      if (t.text == "wait") {
        next();
        std::string x = ident("channel");
        expect(";");
        return p_wait(x, proc(), pos);
      }
      if (t.text == "send") {
        next();
        std::string x = ident("channel");
        std::string y = ident("channel");
        expect(";");
        return p_send(x, y, proc(), pos);
      }
      if (t.text == "delay") {
        next();
        uint64_t n = 1;
        PExprP e;
        if (is_sym("{")) {
          next();
          e = pexpr();
          expect("}");
          if (pexpr_ground(e)) {
            n = eval(e, {});
            e = nullptr;
          }
        }
        expect(";");
        Origin o = prev().marked ? Origin::Reconstructed : Origin::Source;
        ProcP cont = proc();
        if (!e && n == 0) return cont;
        Proc d = *p_delay(n, o, cont, pos);
        d.count_expr = e;
        return std::make_shared<const Proc>(std::move(d));
      }
      if (t.text == "tick") {
        next();
        expect(";");
        return p_delay(1, Origin::Tick, proc(), pos);
      }
      if (t.text == "when?" || t.text == "now!") {
        bool when = next().text == "when?";
        std::string x = ident("channel");
        expect(";");
        Origin o = prev().marked ? Origin::Reconstructed : Origin::Source;
        ProcP cont = proc();
        return when ? p_when(x, cont, o, pos) : p_now(x, cont, o, pos);
      }
      fail("syntax error in process", {"process"});
    }
    if (t.kind != Tok::Ident) fail("syntax error in process", {"process"});
    std::string x = next().text;
    if (is_sym(".")) {
      next();
      std::string l = ident("label");
      expect(";");
      return p_send_label(x, l, proc(), pos);
    }
    if (is_sym(":")) {
      next();
      TypeP a = type();
      expect("<-");
      expect("(");
      ProcP body = proc();
      expect(")");
      expect(";");
      const Token& semi = prev();
      ProcP cont = proc();
      ProcP cut = p_cut(x, a, body, cont, pos);
      if (semi.marked) {
        Proc c = *cut;
        c.origin = Origin::Reconstructed;
        c.coerced = semi.mark;
        cut = std::make_shared<const Proc>(std::move(c));
      }
      return cut;
    }
    expect("<-");
    if (is_kw("recv")) {
      next();
      std::string c = ident("channel");
      expect(";");
      return p_recv(x, c, proc(), pos);
    }
    std::string f = ident("process or channel");
    std::vector<PExprP> args;
    bool call = false;
    if (is_sym("[")) {
      call = true;
      next();
      args.push_back(pexpr());
      while (is_sym(",")) {
        next();
        args.push_back(pexpr());
      }
      expect("]");
    }
    std::vector<std::string> ys;
    if (is_sym("<-")) {
      call = true;
      next();
      while (peek().kind == Tok::Ident) ys.push_back(next().text);
    }
    if (is_sym(";")) {
      next();
      const Token& semi = prev();
      ProcP sp = p_spawn(x, f, std::move(args), std::move(ys), proc(), pos);
      if (semi.marked) {
        Proc c = *sp;
        c.origin = Origin::Reconstructed;
        c.coerced = semi.mark;
        sp = std::make_shared<const Proc>(std::move(c));
      }
      return sp;
    }
    if (call) return p_tail(x, f, std::move(args), std::move(ys), pos);
    return p_fwd(x, f, pos);
  }

  // ---- top level

  void type_item(Signature& sig) {
    next();
    Pos pos = peek().pos;
    std::string n = ident("type name");
    TypeClause c;
    c.pos = pos;
    c.pats = patterns();
    expect("=");
    c.body = type();
    TypeDef* d = nullptr;
    for (auto& t : sig.types)
      if (t.name == n) d = &t;
    if (!d) {
      sig.types.push_back({n, {}});
      d = &sig.types.back();
    } else if (d->arity() != c.pats.size()) {
      throw ParseError(pos, "clause arity differs for type '" + n + "'");
    }
    d->clauses.push_back(std::move(c));
  }

  ChanDecl chan_decl() {
    expect("(");
    ChanDecl c;
    c.name = ident("channel");
    expect(":");
    c.type = type();
    expect(")");
    return c;
  }

  void decl_item(Signature& sig) {
    next();
    Pos pos = peek().pos;
    std::string n = ident("process name");
    DeclClause c;
    c.pos = pos;
    c.pats = patterns();
    expect(":");
    if (is_sym(".")) next();
    while (is_sym("(")) c.ctx.push_back(chan_decl());
    expect("|-");
    c.offer = chan_decl();
    std::set<std::string> names{c.offer.name};
    for (auto& d : c.ctx)
      if (!names.insert(d.name).second)
        throw ParseError(pos, "channel '" + d.name + "' declared twice in '" + n + "'");
    ProcDecl* d = nullptr;
    for (auto& t : sig.decls)
      if (t.name == n) d = &t;
    if (!d) {
      sig.decls.push_back({n, {}});
      d = &sig.decls.back();
    } else if (d->arity() != c.pats.size()) {
      throw ParseError(pos, "clause arity differs for declaration '" + n + "'");
    }
    d->clauses.push_back(std::move(c));
  }

  void proc_item(Signature& sig) {
    next();
    DefClause c;
    c.pos = peek().pos;
    c.dest = ident("channel");
    expect("<-");
    Pos npos = peek().pos;
    std::string n = ident("process name");
    c.pats = patterns();
    if (is_sym("<-")) {
      next();
      while (peek().kind == Tok::Ident) c.chans.push_back(next().text);
    }
    expect("=");
    c.body = proc();
    ProcDef* d = nullptr;
    for (auto& t : sig.defs)
      if (t.name == n) d = &t;
    if (!d) {
      sig.defs.push_back({n, {}});
      d = &sig.defs.back();
    } else if (d->arity() != c.pats.size()) {
      throw ParseError(npos, "clause arity differs for process '" + n + "'");
    }
    d->clauses.push_back(std::move(c));
  }

  // Forwards to declared process names are zero-argument tail calls.
  ProcP resolve_proc(const ProcP& p, const Signature& sig) {
    if (!p) return p;
    if (p->kind == PK::Fwd && sig.find_decl(p->other))
      return p_tail(p->chan, p->other, {}, {}, p->pos);
    Proc q = *p;
    q.body = resolve_proc(p->body, sig);
    q.cont = resolve_proc(p->cont, sig);
    for (auto& [l, b] : q.branches) b = resolve_proc(b, sig);
    return std::make_shared<const Proc>(std::move(q));
  }

  void check_calls(const ProcP& p, const Signature& sig) {
    if (!p) return;
    if (p->kind == PK::Spawn || p->kind == PK::TailCall) {
      const ProcDecl* d = sig.find_decl(p->callee);
      if (!d) throw ParseError(p->pos, "unknown process '" + p->callee + "'");
      if (d->arity() != p->args.size())
        throw ParseError(p->pos, "arity mismatch in call to '" + p->callee + "'");
    }
    check_calls(p->body, sig);
    check_calls(p->cont, sig);
    for (auto& [l, b] : p->branches) check_calls(b, sig);
  }

  void resolve(Signature& sig) {
    for (auto& u : type_uses_) {
      const TypeDef* d = sig.find_type(u.name);
      if (!d) throw ParseError(u.pos, "undefined type name '" + u.name + "'");
      if (d->arity() != u.arity)
        throw ParseError(u.pos, "arity mismatch for type '" + u.name + "'");
    }
    for (auto& def : sig.defs) {
      const ProcDecl* d = sig.find_decl(def.name);
      if (!d)
        throw ParseError(def.clauses[0].pos, "process '" + def.name + "' has no declaration");
      if (d->arity() != def.arity())
        throw ParseError(def.clauses[0].pos, "arity mismatch between declaration and definition of '" + def.name + "'");
      for (auto& c : def.clauses) {
        c.body = resolve_proc(c.body, sig);
        check_calls(c.body, sig);
      }
    }
  }
};

}  // namespace

Signature parse_program(const std::string& text) { return Parser(text).program(); }

TypeP parse_type(const std::string& text) { return Parser(text).lone_type(); }

}  // namespace tss
