#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tss {

struct Pos {
  int line = 0;
  int col = 0;
};

// Index expressions over natural-number parameters.
struct ParamExpr;
using PExprP = std::shared_ptr<const ParamExpr>;

struct ParamExpr {
  enum class Kind { Const, Var, Add, Mul };
  Kind kind = Kind::Const;
  uint64_t value = 0;
  std::string var;
  PExprP lhs, rhs;
};

using Binding = std::map<std::string, uint64_t>;

PExprP pconst(uint64_t v);
PExprP pvar(std::string name);
PExprP padd(PExprP a, PExprP b);
PExprP pmul(PExprP a, PExprP b);
bool pexpr_ground(const PExprP& e);
uint64_t eval(const PExprP& e, const Binding& b);
std::string to_string(const PExprP& e);
bool pexpr_equal(const PExprP& a, const PExprP& b);

// Session types. Values are immutable and shared.
struct Type;
using TypeP = std::shared_ptr<const Type>;

enum class TK { Plus, With, One, Tensor, Lolli, Next, Box, Diamond, Name };

struct Type {
  TK kind = TK::One;
  std::vector<std::pair<std::string, TypeP>> branches;  // Plus, With
  TypeP a, b;        // Tensor/Lolli use both; Next/Box/Diamond use a
  uint64_t n = 0;    // Next count when ground
  PExprP count;      // Next count when symbolic (templates only)
  std::string name;  // Name
  std::vector<PExprP> args;
};

TypeP t_one();
TypeP t_plus(std::vector<std::pair<std::string, TypeP>> bs);
TypeP t_with(std::vector<std::pair<std::string, TypeP>> bs);
TypeP t_tensor(TypeP a, TypeP b);
TypeP t_lolli(TypeP a, TypeP b);
TypeP t_next(uint64_t n, TypeP a);  // n = 0 yields a; nested counters merge
TypeP t_next_sym(PExprP count, TypeP a);
TypeP t_box(TypeP a);
TypeP t_dia(TypeP a);
TypeP t_name(std::string name, std::vector<PExprP> args = {});

bool type_ground(const TypeP& t);
// Syntactic equality; names compare by identifier and arguments.
bool same_type(const TypeP& a, const TypeP& b);
size_t type_hash(const TypeP& t);
std::string to_string(const TypeP& t);

// Process expressions.
struct Proc;
using ProcP = std::shared_ptr<const Proc>;

enum class PK {
  Spawn, TailCall, Cut, Fwd, SendLabel, Case, Close, Wait,
  SendChan, RecvChan, Delay, When, Now
};

enum class Origin { Source, Tick, Reconstructed };

// Field use by kind:
//   Spawn     chan <- callee[args] <- chans ; cont
//   TailCall  chan <- callee[args] <- chans
//   Cut       chan : annot <- (body) ; cont
//   Fwd       chan <- other
//   SendLabel chan.label ; cont
//   Case      case chan (branches)
//   Close     close chan
//   Wait      wait chan ; cont
//   SendChan  send chan other ; cont
//   RecvChan  other <- recv chan ; cont
//   Delay     delay{count} ; cont
//   When/Now  when? chan ; cont / now! chan ; cont
// A Reconstructed Cut or Spawn is a coercion; `coerced` holds the channel
// name it stands in for.
struct Proc {
  PK kind = PK::Close;
  Pos pos;
  std::string chan, other, label, callee;
  std::vector<PExprP> args;
  std::vector<std::string> chans;
  TypeP annot;
  ProcP body, cont;
  std::vector<std::pair<std::string, ProcP>> branches;
  uint64_t count = 1;
  PExprP count_expr;
  Origin origin = Origin::Source;
  std::string coerced;
};

ProcP p_spawn(std::string x, std::string f, std::vector<PExprP> args,
              std::vector<std::string> ys, ProcP cont, Pos pos = {});
ProcP p_tail(std::string x, std::string f, std::vector<PExprP> args,
             std::vector<std::string> ys, Pos pos = {});
ProcP p_cut(std::string x, TypeP t, ProcP body, ProcP cont, Pos pos = {});
ProcP p_fwd(std::string x, std::string y, Pos pos = {});
ProcP p_send_label(std::string x, std::string l, ProcP cont, Pos pos = {});
ProcP p_case(std::string x, std::vector<std::pair<std::string, ProcP>> bs,
             Pos pos = {});
ProcP p_close(std::string x, Pos pos = {});
ProcP p_wait(std::string x, ProcP cont, Pos pos = {});
ProcP p_send(std::string x, std::string y, ProcP cont, Pos pos = {});
ProcP p_recv(std::string y, std::string x, ProcP cont, Pos pos = {});
ProcP p_delay(uint64_t n, Origin o, ProcP cont, Pos pos = {});
ProcP p_when(std::string x, ProcP cont, Origin o = Origin::Source, Pos pos = {});
ProcP p_now(std::string x, ProcP cont, Origin o = Origin::Source, Pos pos = {});

// Copy of p with a new continuation (kinds that have one).
ProcP with_cont(const ProcP& p, ProcP cont);

bool same_proc(const ProcP& a, const ProcP& b);
// Renames free occurrences of `from` to `to`; `to` must not be bound in p.
ProcP rename(const ProcP& p, const std::string& from, const std::string& to);
std::vector<std::string> free_channels(const ProcP& p);

// Index patterns in definition heads: `n`, `0`, `n+1`.
struct IndexPat {
  enum class Kind { Var, Const, Succ };
  Kind kind = Kind::Var;
  std::string var;
  uint64_t k = 0;
};

struct TypeClause {
  std::vector<IndexPat> pats;
  TypeP body;
  Pos pos;
};

struct TypeDef {
  std::string name;
  std::vector<TypeClause> clauses;
  size_t arity() const { return clauses.empty() ? 0 : clauses[0].pats.size(); }
};

struct ChanDecl {
  std::string name;
  TypeP type;
};

struct DeclClause {
  std::vector<IndexPat> pats;
  std::vector<ChanDecl> ctx;
  ChanDecl offer;
  Pos pos;
};

struct ProcDecl {
  std::string name;
  std::vector<DeclClause> clauses;
  size_t arity() const { return clauses.empty() ? 0 : clauses[0].pats.size(); }
};

struct DefClause {
  std::vector<IndexPat> pats;
  std::string dest;
  std::vector<std::string> chans;
  ProcP body;
  Pos pos;
};

struct ProcDef {
  std::string name;
  std::vector<DefClause> clauses;
  size_t arity() const { return clauses.empty() ? 0 : clauses[0].pats.size(); }
};

struct Signature {
  std::vector<TypeDef> types;
  std::vector<ProcDecl> decls;
  std::vector<ProcDef> defs;

  const TypeDef* find_type(const std::string& n) const;
  const ProcDecl* find_decl(const std::string& n) const;
  const ProcDef* find_def(const std::string& n) const;
  bool ground() const;
};

bool same_signature(const Signature& a, const Signature& b);

struct ParseError : std::runtime_error {
  Pos pos;
  std::vector<std::string> expected;
  ParseError(Pos p, const std::string& msg, std::vector<std::string> exp = {});
};

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Signature parse_program(const std::string& text);
TypeP parse_type(const std::string& text);
std::string pretty_print(const Signature& sig);
std::string print_proc(const ProcP& p, int indent = 0);

std::string mangle(const std::string& name, const std::vector<uint64_t>& args);

// Grounds `def` (a type or process name) under `binding` together with
// every definition reachable from it.
Signature instantiate(const Signature& sig, const std::string& def,
                      const Binding& binding);
// Grounds an explicit instance such as `append[1,2,3]`; returns the
// mangled root name through `root`.
Signature instantiate_call(const Signature& sig, const std::string& name,
                           const std::vector<uint64_t>& args, std::string* root);
// Grounds every parameter-free definition and whatever it reaches.
Signature ground_all(const Signature& sig);
// Names of a definition's parameters, by position.
std::vector<std::string> param_names(const Signature& sig, const std::string& def);

}  // namespace tss
