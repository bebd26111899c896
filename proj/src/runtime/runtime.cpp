#include "tss/runtime.h"

#include <algorithm>
#include <functional>
#include <regex>
#include <set>
#include <json.hpp>

namespace tss {

struct SchedulerAccess {
  static std::mt19937_64& rng(Scheduler& s) { return s.rng_; }
  static uint64_t& last(Scheduler& s) { return s.last_rank_; }
};

namespace {

std::string flat(const ProcP& p) {
  std::string s = print_proc(p), out;
  bool space = false;
  for (char ch : s) {
    if (ch == '\n' || ch == ' ' || ch == '\t') {
      space = true;
      continue;
    }
    if (space && !out.empty()) out += ' ';
    space = false;
    out += ch;
  }
  return out;
}

ObjView view(const SemObj& o) { return {o.kind, o.chan, o.time, flat(o.body), o.body}; }

uint64_t max_source_chan(const Signature& sig) {
  static const std::regex re("c([0-9]+)");
  uint64_t best = 0;
  bool any = false;
  std::function<void(const ProcP&)> walk = [&](const ProcP& p) {
    if (!p) return;
    std::vector<std::string> names{p->chan, p->other};
    names.insert(names.end(), p->chans.begin(), p->chans.end());
    for (auto& n : names) {
      std::smatch m;
      if (std::regex_match(n, m, re) && m[1].length() < 18) {
        best = std::max<uint64_t>(best, std::stoull(m[1]));
        any = true;
      }
    }
    walk(p->body);
    walk(p->cont);
    for (auto& [l, b] : p->branches) walk(b);
  };
  for (auto& d : sig.defs)
    for (auto& c : d.clauses) {
      walk(c.body);
      std::smatch m;
      std::vector<std::string> names{c.dest};
      names.insert(names.end(), c.chans.begin(), c.chans.end());
      for (auto& n : names)
        if (std::regex_match(n, m, re) && m[1].length() < 18) {
          best = std::max<uint64_t>(best, std::stoull(m[1]));
          any = true;
        }
    }
  return any ? best + 1 : 0;
}

enum class Rule {
  PlusS, PlusC, WithS, WithC, OneS, OneC, TensorS, TensorC, LolliS, LolliC,
  IdPos, IdNeg, Cut, Def, Next, DiaS, DiaC, BoxS, BoxC
};

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::PlusS: return "⊕S";
    case Rule::PlusC: return "⊕C";
    case Rule::WithS: return "&S";
    case Rule::WithC: return "&C";
    case Rule::OneS: return "1S";
    case Rule::OneC: return "1C";
    case Rule::TensorS: return "⊗S";
    case Rule::TensorC: return "⊗C";
    case Rule::LolliS: return "⊸S";
    case Rule::LolliC: return "⊸C";
    case Rule::IdPos: return "id⁺C";
    case Rule::IdNeg: return "id⁻C";
    case Rule::Cut: return "cutC";
    case Rule::Def: return "defC";
    case Rule::Next: return "○C";
    case Rule::DiaS: return "◇S";
    case Rule::DiaC: return "◇C";
    case Rule::BoxS: return "□S";
    case Rule::BoxC: return "□C";
  }
  return "?";
}

constexpr size_t npos = static_cast<size_t>(-1);

struct Action {
  Rule rule;
  size_t proc;
  size_t partner = npos;
};

bool positive(const SemObj& m) { return m.body->chan == m.chan; }

// Channels whose provider decides whether the process o can fire.
std::vector<std::string> watched(const SemObj& o) {
  std::vector<std::string> w;
  if (o.kind != SemObj::Kind::Proc) return w;
  if (o.body->chan != o.chan) w.push_back(o.body->chan);
  if (o.body->kind == PK::Fwd) w.push_back(o.body->other);
  return w;
}

struct Index {
  std::unordered_map<std::string, size_t> provider;
  std::unordered_map<std::string, size_t> neg;  // client message sent on a channel
  std::unordered_map<std::string, std::string> watcher;

  void add(const Configuration& c, size_t i) {
    const SemObj& o = c.objects[i];
    provider[o.chan] = i;
    if (o.kind == SemObj::Kind::Msg && !positive(o)) neg[o.body->chan] = i;
    for (auto& w : watched(o)) watcher[w] = o.chan;
  }

  void remove(const SemObj& o) {
    provider.erase(o.chan);
    if (o.kind == SemObj::Kind::Msg && !positive(o)) neg.erase(o.body->chan);
    for (auto& w : watched(o))
      if (auto it = watcher.find(w); it != watcher.end() && it->second == o.chan) watcher.erase(it);
  }
};

std::optional<Action> enabled(const Configuration& c, const Index& ix, size_t i) {
  const SemObj& o = c.objects[i];
  if (o.kind != SemObj::Kind::Proc) return std::nullopt;
  const Proc& p = *o.body;
  bool own = p.chan == o.chan;
  auto msg_on = [&](const std::string& x, PK k, bool exact) -> size_t {
    auto it = ix.provider.find(x);
    if (it == ix.provider.end()) return npos;
    const SemObj& m = c.objects[it->second];
    if (m.kind != SemObj::Kind::Msg || !positive(m) || m.body->kind != k) return npos;
    if (exact ? m.time != o.time : m.time < o.time) return npos;
    return it->second;
  };
  auto msg_to = [&](const std::string& x, PK k, bool exact) -> size_t {
    auto it = ix.neg.find(x);
    if (it == ix.neg.end()) return npos;
    const SemObj& m = c.objects[it->second];
    if (m.body->kind != k) return npos;
    if (exact ? m.time != o.time : m.time < o.time) return npos;
    return it->second;
  };
  auto with = [&](Rule r, size_t j) -> std::optional<Action> {
    if (j == npos) return std::nullopt;
    return Action{r, i, j};
  };
  switch (p.kind) {
    case PK::Delay: return Action{Rule::Next, i};
    case PK::Cut: return Action{Rule::Cut, i};
    case PK::Spawn:
    case PK::TailCall: return Action{Rule::Def, i};
    case PK::SendLabel: return Action{own ? Rule::PlusS : Rule::WithS, i};
    case PK::Close:
      if (own) return Action{Rule::OneS, i};
      return std::nullopt;
    case PK::SendChan: return Action{own ? Rule::TensorS : Rule::LolliS, i};
    case PK::Now: return Action{own ? Rule::DiaS : Rule::BoxS, i};
    case PK::Fwd: {
      auto it = ix.provider.find(p.other);
      if (it != ix.provider.end()) {
        const SemObj& m = c.objects[it->second];
        if (m.kind == SemObj::Kind::Msg && m.time >= o.time) return Action{Rule::IdPos, i, it->second};
      }
      auto jt = ix.neg.find(o.chan);
      if (jt != ix.neg.end() && c.objects[jt->second].time >= o.time)
        return Action{Rule::IdNeg, i, jt->second};
      return std::nullopt;
    }
    case PK::Case:
      if (own) return with(Rule::WithC, msg_to(o.chan, PK::SendLabel, true));
      return with(Rule::PlusC, msg_on(p.chan, PK::SendLabel, true));
    case PK::Wait:
      if (own) return std::nullopt;
      return with(Rule::OneC, msg_on(p.chan, PK::Close, true));
    case PK::RecvChan:
      if (own) return with(Rule::LolliC, msg_to(o.chan, PK::SendChan, true));
      return with(Rule::TensorC, msg_on(p.chan, PK::SendChan, true));
    case PK::When:
      if (own) return with(Rule::BoxC, msg_to(o.chan, PK::Now, false));
      return with(Rule::DiaC, msg_on(p.chan, PK::Now, false));
  }
  return std::nullopt;
}

class Firing {
 public:
  Firing(const TypeEnv& env, Configuration& c) : env_(env), c_(c) {}

  StepRecord fire(const Action& a) {
    SemObj o = c_.objects[a.proc];
    const Proc& p = *o.body;
    rec_.rule = rule_name(a.rule);
    rec_.time = o.time;
    consume(a.proc);
    if (a.partner != npos) consume(a.partner);
    SemObj m = a.partner != npos ? c_.objects[a.partner] : SemObj{};
    const std::string& x = p.chan;
    switch (a.rule) {
      case Rule::Next: {
        ProcP next = p.count > 1 ? step_delay(o.body) : p.cont;
        produce(SemObj::Kind::Proc, o.chan, o.time + 1, next);
        break;
      }
      case Rule::Cut: {
        std::string n = fresh(ghost_at(p.annot, o.time));
        produce(SemObj::Kind::Proc, n, o.time, rename(p.body, p.chan, n));
        produce(SemObj::Kind::Proc, o.chan, o.time, rename(p.cont, p.chan, n));
        break;
      }
      case Rule::Def: {
        const ProcDecl* d = env_.sig().find_decl(p.callee);
        const ProcDef* def = env_.sig().find_def(p.callee);
        if (!d || !def) throw UnknownProcess("no definition for process '" + p.callee + "'");
        const DefClause& dc = def->clauses[0];
        std::string n = fresh(ghost_at(d->clauses[0].offer.type, o.time));
        ProcP body = rename(dc.body, dc.dest, n);
        for (size_t k = 0; k < dc.chans.size() && k < p.chans.size(); ++k)
          body = rename(body, dc.chans[k], p.chans[k]);
        produce(SemObj::Kind::Proc, n, o.time, body);
        if (p.kind == PK::Spawn)
          produce(SemObj::Kind::Proc, o.chan, o.time, rename(p.cont, p.chan, n));
        else
          produce(SemObj::Kind::Proc, o.chan, o.time, p_fwd(o.chan, n, p.pos));
        break;
      }
      case Rule::PlusS:
      case Rule::TensorS:
      case Rule::DiaS: {
        std::string n = fresh(continuation(x, p, o.time));
        produce(SemObj::Kind::Proc, n, o.time, rename(p.cont, x, n));
        produce(SemObj::Kind::Msg, x, o.time, with_cont(o.body, p_fwd(x, n)));
        break;
      }
      case Rule::WithS:
      case Rule::LolliS:
      case Rule::BoxS: {
        std::string n = fresh(continuation(x, p, o.time));
        produce(SemObj::Kind::Msg, n, o.time, with_cont(o.body, p_fwd(n, x)));
        produce(SemObj::Kind::Proc, o.chan, o.time, rename(p.cont, x, n));
        break;
      }
      case Rule::OneS: produce(SemObj::Kind::Msg, x, o.time, o.body); break;
      case Rule::PlusC: {
        const std::string& n = m.body->cont->other;
        produce(SemObj::Kind::Proc, o.chan, o.time, rename(branch(p, m.body->label), x, n));
        break;
      }
      case Rule::WithC:
        produce(SemObj::Kind::Proc, m.chan, o.time, rename(branch(p, m.body->label), x, m.chan));
        break;
      case Rule::OneC: produce(SemObj::Kind::Proc, o.chan, o.time, p.cont); break;
      case Rule::TensorC: {
        const std::string& n = m.body->cont->other;
        ProcP q = rename(rename(p.cont, p.other, m.body->other), x, n);
        produce(SemObj::Kind::Proc, o.chan, o.time, q);
        break;
      }
      case Rule::LolliC: {
        ProcP q = rename(rename(p.cont, p.other, m.body->other), x, m.chan);
        produce(SemObj::Kind::Proc, m.chan, o.time, q);
        break;
      }
      case Rule::DiaC: {
        const std::string& n = m.body->cont->other;
        produce(SemObj::Kind::Proc, o.chan, m.time, rename(p.cont, x, n));
        break;
      }
      case Rule::BoxC:
        produce(SemObj::Kind::Proc, m.chan, m.time, rename(p.cont, x, m.chan));
        break;
      case Rule::IdPos:
        produce(SemObj::Kind::Msg, o.chan, m.time, rename(m.body, m.chan, o.chan));
        break;
      case Rule::IdNeg:
        produce(SemObj::Kind::Msg, m.chan, m.time, rename(m.body, o.chan, p.other));
        break;
    }
    return rec_;
  }

  std::vector<SemObj>& produced() { return produced_; }

 private:
  const TypeEnv& env_;
  Configuration& c_;
  StepRecord rec_;
  std::vector<SemObj> produced_;

  void consume(size_t i) { rec_.consumed.push_back(view(c_.objects[i])); }
  void produce(SemObj::Kind k, const std::string& ch, uint64_t t, ProcP body) {
    SemObj o{k, ch, t, std::move(body)};
    rec_.produced.push_back(view(o));
    produced_.push_back(std::move(o));
  }

  static ProcP step_delay(const ProcP& p) {
    Proc q = *p;
    q.count -= 1;
    return std::make_shared<const Proc>(std::move(q));
  }

  static const ProcP& branch(const Proc& p, const std::string& l) {
    for (auto& [m, b] : p.branches)
      if (m == l) return b;
    throw StuckNotPoised("case on '" + p.chan + "' has no branch for label '" + l + "'");
  }

  TypeP ghost_at(const TypeP& t, uint64_t time) const { return t ? t_next(time, t) : nullptr; }

  // Absolute type of the continuation channel after the action on x.
  TypeP continuation(const std::string& x, const Proc& p, uint64_t time) const {
    auto it = c_.ghost.find(x);
    if (it == c_.ghost.end() || !it->second) return nullptr;
    TypeP h = strip_next(env_, it->second).second;
    switch (h->kind) {
      case TK::Plus:
      case TK::With:
        for (auto& [l, b] : h->branches)
          if (l == p.label) return ghost_at(b, time);
        return nullptr;
      case TK::Tensor:
      case TK::Lolli: return ghost_at(h->b, time);
      case TK::Box:
      case TK::Diamond: return ghost_at(h->a, time);
      default: return nullptr;
    }
  }

  std::string fresh(TypeP ghost) {
    std::string n = "c" + std::to_string(c_.next_chan++);
    c_.ghost[n] = std::move(ghost);
    c_.rank[n] = c_.next_chan;
    return n;
  }
};

uint64_t rank_of(const Configuration& c, const std::string& chan) {
  auto it = c.rank.find(chan);
  return it == c.rank.end() ? 0 : it->second;
}

// Keeps the channel index and the set of processes that can fire up to
// date across steps, touching only the objects a step consumed or produced
// and the processes watching them.
class Stepper {
 public:
  Stepper(const TypeEnv& env, Configuration& c) : env_(env), c_(c) {
    for (size_t i = 0; i < c_.objects.size(); ++i) ix_.add(c_, i);
    for (auto& o : c_.objects) refresh(o.chan);
  }

  std::optional<StepRecord> step(Scheduler& s) {
    if (ready_.empty()) {
      for (auto& o : c_.objects)
        if (!is_poised(o)) throw StuckNotPoised("no rule applies and " + describe(o) + " is not poised");
      return std::nullopt;
    }
    auto pick = ready_.begin();
    switch (s.kind()) {
      case SchedKind::RoundRobin: {
        uint64_t& last = SchedulerAccess::last(s);
        if (last != UINT64_MAX) {
          pick = ready_.lower_bound({last + 1, std::string()});
          if (pick == ready_.end()) pick = ready_.begin();
        }
        last = pick->first;
        break;
      }
      case SchedKind::SeededRandom:
        std::advance(pick, std::uniform_int_distribution<size_t>(0, ready_.size() - 1)(
                               SchedulerAccess::rng(s)));
        break;
      case SchedKind::TimeSynchronous: {
        auto key = [&](const std::pair<uint64_t, std::string>& k) {
          const SemObj& o = c_.objects[ix_.provider.at(k.second)];
          bool next = o.body->kind == PK::Delay;
          return std::make_tuple(o.time, next ? 1 : 0, k.first);
        };
        for (auto it = ready_.begin(); it != ready_.end(); ++it)
          if (key(*it) < key(*pick)) pick = it;
        break;
      }
    }
    Action a = *enabled(c_, ix_, ix_.provider.at(pick->second));
    Firing f(env_, c_);
    StepRecord rec = f.fire(a);
    std::vector<std::string> touched;
    std::string partner = a.partner != npos ? c_.objects[a.partner].chan : "";
    touch(c_.objects[a.proc], touched);
    remove(c_.objects[a.proc].chan);
    if (!partner.empty()) {
      touch(c_.objects[ix_.provider.at(partner)], touched);
      remove(partner);
    }
    for (auto& o : f.produced()) {
      c_.objects.push_back(std::move(o));
      ix_.add(c_, c_.objects.size() - 1);
      touch(c_.objects.back(), touched);
    }
    for (auto& x : touched) refresh(x);
    return rec;
  }

 private:
  const TypeEnv& env_;
  Configuration& c_;
  Index ix_;
  std::set<std::pair<uint64_t, std::string>> ready_;  // (rank, channel)

  // Channels whose readiness may change when o appears or disappears.
  void touch(const SemObj& o, std::vector<std::string>& out) const {
    out.push_back(o.chan);
    if (auto it = ix_.watcher.find(o.chan); it != ix_.watcher.end()) out.push_back(it->second);
    if (o.kind == SemObj::Kind::Msg && !positive(o)) out.push_back(o.body->chan);
  }

  void remove(const std::string& chan) {
    size_t i = ix_.provider.at(chan);
    ix_.remove(c_.objects[i]);
    if (i + 1 != c_.objects.size()) {
      c_.objects[i] = std::move(c_.objects.back());
      c_.objects.pop_back();
      ix_.add(c_, i);
    } else {
      c_.objects.pop_back();
    }
  }

  void refresh(const std::string& chan) {
    std::pair<uint64_t, std::string> key{rank_of(c_, chan), chan};
    auto it = ix_.provider.find(chan);
    if (it != ix_.provider.end() && enabled(c_, ix_, it->second)) ready_.insert(key);
    else ready_.erase(key);
  }
};

}  // namespace

Configuration init_config(const TypeEnv& env, const std::string& main) {
  const ProcDecl* d = env.sig().find_decl(main);
  if (!d || !env.sig().find_def(main)) throw UnknownProcess("unknown process '" + main + "'");
  if (d->arity() != 0) throw UnknownProcess("process '" + main + "' is parameterized; instantiate it first");
  if (!d->clauses[0].ctx.empty())
    throw NonEmptyContext("process '" + main + "' uses channels; a main process must have an empty context");
  Configuration c;
  c.next_chan = max_source_chan(env.sig());
  c.root = "c" + std::to_string(c.next_chan++);
  c.ghost[c.root] = d->clauses[0].offer.type;
  c.rank[c.root] = c.next_chan;
  c.objects.push_back({SemObj::Kind::Proc, c.root, 0, p_tail(c.root, main, {}, {})});
  return c;
}

Scheduler parse_scheduler(const std::string& s) {
  if (s == "rr" || s == "round-robin") return Scheduler::round_robin();
  if (s == "sync" || s == "time-synchronous") return Scheduler::time_synchronous();
  if (s == "random") return Scheduler::seeded(0);
  if (s.rfind("random:", 0) == 0) {
    try {
      return Scheduler::seeded(std::stoull(s.substr(7)));
    } catch (std::exception&) {
    }
  }
  throw std::invalid_argument("unknown scheduler '" + s + "' (rr, sync, random[:SEED])");
}

std::string to_string(const Scheduler& s) {
  switch (s.kind()) {
    case SchedKind::RoundRobin: return "rr";
    case SchedKind::TimeSynchronous: return "sync";
    case SchedKind::SeededRandom: return "random:" + std::to_string(s.seed());
  }
  return "";
}

std::string describe(const SemObj& o) {
  return std::string(o.kind == SemObj::Kind::Proc ? "proc(" : "msg(") + o.chan + ", " +
         std::to_string(o.time) + ", " + flat(o.body) + ")";
}

std::string to_line(const StepRecord& r) {
  auto side = [](const std::vector<ObjView>& v) {
    std::string s;
    for (auto& o : v) {
      if (!s.empty()) s += ", ";
      s += std::string(o.kind == SemObj::Kind::Proc ? "proc(" : "msg(") + o.chan + "@" +
           std::to_string(o.time) + ")";
    }
    return s;
  };
  return "t=" + std::to_string(r.time) + " " + r.rule + " " + side(r.consumed) + " => " +
         side(r.produced);
}

std::optional<StepRecord> step(const TypeEnv& env, Configuration& c, Scheduler& s) {
  return Stepper(env, c).step(s);
}

RunResult run(const TypeEnv& env, Configuration c, Scheduler& s, size_t budget,
              const StepHook& hook) {
  RunResult r;
  r.status = RunStatus::BudgetExhausted;
  Stepper st(env, c);
  while (r.steps < budget) {
    auto rec = st.step(s);
    if (!rec) {
      r.status = RunStatus::Quiescent;
      break;
    }
    ++r.steps;
    r.trace.push_back(std::move(*rec));
    if (hook && !hook(c, r.trace.back())) break;
  }
  r.final = std::move(c);
  return r;
}

bool is_poised(const SemObj& o) {
  if (o.kind == SemObj::Kind::Msg) return true;
  const Proc& p = *o.body;
  switch (p.kind) {
    case PK::Fwd: return true;
    case PK::SendLabel:
    case PK::Case:
    case PK::Close:
    case PK::SendChan:
    case PK::RecvChan:
    case PK::When:
    case PK::Now: return p.chan == o.chan;
    default: return false;
  }
}

bool is_poised(const Configuration& c) {
  return std::all_of(c.objects.begin(), c.objects.end(),
                     [](const SemObj& o) { return is_poised(o); });
}

std::vector<Observation> root_observations(const Configuration& c) {
  std::unordered_map<std::string, const SemObj*> by;
  for (auto& o : c.objects) by[o.chan] = &o;
  std::vector<Observation> out;
  std::string x = c.root;
  std::set<std::string> seen;
  while (seen.insert(x).second) {
    auto it = by.find(x);
    if (it == by.end()) break;
    const SemObj& o = *it->second;
    const Proc& p = *o.body;
    if (o.kind == SemObj::Kind::Proc) {
      if (p.kind != PK::Fwd) break;
      x = p.other;
      continue;
    }
    if (!positive(o)) break;
    switch (p.kind) {
      case PK::SendLabel: out.push_back({x, o.time, p.label}); break;
      case PK::Close: out.push_back({x, o.time, "close"}); return out;
      case PK::SendChan: out.push_back({x, o.time, "send"}); break;
      case PK::Now: out.push_back({x, o.time, "now"}); break;
      default: return out;
    }
    x = p.cont->other;
  }
  return out;
}

std::string trace_json(const std::vector<StepRecord>& trace) {
  nlohmann::json arr = nlohmann::json::array();
  auto objs = [](const std::vector<ObjView>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (auto& o : v)
      a.push_back({{"kind", o.kind == SemObj::Kind::Proc ? "proc" : "msg"},
                   {"chan", o.chan},
                   {"time", o.time},
                   {"body", o.text}});
    return a;
  };
  for (auto& r : trace)
    arr.push_back({{"rule", r.rule},
                   {"time", r.time},
                   {"consumed", objs(r.consumed)},
                   {"produced", objs(r.produced)}});
  return arr.dump(1);
}

}  // namespace tss
