#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <json.hpp>

#include "oracles/subtype_oracle.h"
#include "oracles/timing_oracle.h"
#include "tss/corpus.h"
#include "tss/subtyping.h"

using namespace tss;

namespace {

const std::string kCorpus = TSS_CORPUS_DIR;

struct Verdict {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

Program load(const std::string& file, const std::string& cost,
             std::vector<std::string> instances = {}, bool explicit_mode = false) {
  PipelineOptions o{parse_cost_model(cost), explicit_mode, std::move(instances)};
  return load_program(read_file(kCorpus + "/" + file), o);
}

bool def_ok(const Program& p, const std::string& def) {
  if (!p.elaborated.find_def(def)) return false;
  for (auto& e : p.elab_errors)
    if (e.def == def) return false;
  for (auto& e : p.check_errors)
    if (e.def == def) return false;
  return true;
}

std::string interface(const Program& p, const std::string& def) {
  auto [ctx, offer] = definition_interface(p.elaborated, def);
  return show_sequent(ctx, offer);
}

std::string show(const std::vector<Observation>& obs) {
  std::string s;
  for (auto& o : obs) s += (s.empty() ? "" : " ") + o.what + "@" + std::to_string(o.time);
  return s;
}

std::string show(const std::vector<oracle::Event>& ev) {
  std::string s;
  for (auto& e : ev) s += (s.empty() ? "" : " ") + e.what + "@" + std::to_string(e.time);
  return s;
}

// Runs `main` under every scheduler and checks the root chain against `want`
// (a prefix when `prefix` is set) and against the events the declared type
// of `main` prescribes.
void expect_run(Verdict& v, const Program& p, const std::string& main,
                const std::vector<oracle::Event>& want, bool prefix = false, size_t steps = 10000) {
  if (!p.ok()) return v.fail(main + ": program rejected: " + p.diagnostics().front());
  auto [ctx, offer] = definition_interface(p.elaborated, main);
  std::string pick = want.empty() ? "" : want.front().what;
  auto typed = oracle::expected_events(*p.env, offer.type, pick, prefix ? want.size() : 64);
  if (show(typed) != show(want))
    return v.fail(main + ": type prescribes " + show(typed) + ", formula gives " + show(want));
  for (auto& s : all_schedulers()) {
    CheckedRun cr = run_checked(p, main, s, steps, false);
    if (cr.progress) return v.fail(main + " " + to_string(s) + ": " + *cr.progress);
    auto obs = root_observations(cr.result.final);
    if (prefix && obs.size() > want.size()) obs.resize(want.size());
    std::vector<oracle::Event> got;
    for (auto& o : obs) got.push_back({o.time, o.what});
    if (show(got) != show(want))
      return v.fail(main + " " + to_string(s) + ": observed " + show(got) + ", expected " +
                    show(want));
  }
}

Verdict six_trace() {
  Verdict v;
  Program p = load("bits.tss", "r");
  CheckedRun cr = run_checked(p, "six", Scheduler::round_robin(), 10000, false);
  auto obs = root_observations(cr.result.final);
  const char* labels[] = {"b0", "b1", "b1", "$", "close"};
  if (obs.size() != 5) v.fail("expected 5 root messages, got " + show(obs));
  std::set<std::string> chans;
  for (size_t i = 0; v.pass && i < 5; ++i) {
    if (obs[i].time != i || obs[i].what != labels[i]) v.fail("observed " + show(obs));
    chans.insert(obs[i].chan);
  }
  if (v.pass && chans.size() != 5) v.fail("messages share a channel");
  if (v.pass) v.detail = show(obs);
  return v;
}

Verdict golden_verdicts() {
  Verdict v;
  struct Case {
    std::string file, cost, def, sequent;
    bool explicit_mode, ok;
  };
  std::vector<Case> cases = {
      {"bits.tss", "r", "copy", "y : bits |- x : ()bits", false, true},
      {"bits.tss", "r", "plus1", "y : bits |- x : ()bits", false, true},
      {"bits.tss", "r", "plus2", "y : bits |- x : ()^2 bits", false, true},
      {"plus1_forward.tss", "r", "plus1", "y : bits |- x : ()bits", false, false},
      {"plus1_forward.tss", "r", "plus1", "y : bits |- x : ()bits", true, false},
      {"sbits.tss", "r", "compress", "y : bits |- x : ()sbits", false, true},
      {"sbits.tss", "r", "skip1s", "y : bits |- x : ()<>sbits", false, true},
      {"sbits_explicit.tss", "r", "skip1s", "y : bits |- x : ()<>sbits", true, true},
      {"sbits_explicit.tss", "r", "idle", "x' : ()<>sbits |- x : <>sbits", true, true},
      {"counter.tss", "r", "bit0", "d : ()ctr |- c : ctr", true, true},
      {"counter.tss", "r", "bit1", "d : ctr |- c : ctr", true, true},
      {"counter.tss", "r", "empty", "|- c : ctr", true, true},
      {"counter_implicit.tss", "r", "bit0", "d : ()ctr |- c : ctr", false, true},
      {"counter_implicit.tss", "r", "bit1", "d : ctr |- c : ctr", false, true},
      {"counter_implicit.tss", "r", "empty", "|- c : ctr", false, true},
  };
  size_t n = 0;
  for (auto& c : cases) {
    Program p = load(c.file, c.cost, {}, c.explicit_mode);
    std::string tag = c.file + ":" + c.def + (c.explicit_mode ? " (explicit)" : "");
    if (interface(p, c.def) != c.sequent)
      v.fail(tag + " declared as " + interface(p, c.def));
    else if (def_ok(p, c.def) != c.ok)
      v.fail(tag + (c.ok ? " rejected" : " accepted"));
    ++n;
  }
  Program fwd = load("plus1_forward.tss", "r", {}, true);
  if (fwd.check_errors.empty() || fwd.check_errors[0].rule != "id")
    v.fail("raw forward not rejected at the id rule");
  if (v.pass) v.detail = std::to_string(n) + " verdicts match";
  return v;
}

Verdict stack_queue() {
  Verdict v;
  Program s = load("stack.tss", "rs"), q = load("queue.tss", "rs");
  for (uint64_t n = 1; n <= 3 && v.pass; ++n) {
    std::string sn = "S" + std::to_string(n), qn = "Q" + std::to_string(n);
    if (!def_ok(s, sn) || !def_ok(q, qn)) v.fail(sn + "/" + qn + " rejected");
    // The last message is a close; sending it costs one more tick under RS.
    expect_run(v, s, "main" + sn, {{2 * n, "send"}, {2 * n + 1, "close"}});
    expect_run(v, q, "main" + qn, {{4 * n, "send"}, {4 * n + 1, "close"}});
  }
  if (v.pass) v.detail = "finish at 2n+2 and 4n+2 for n = 1..3";
  return v;
}

Verdict append_rates() {
  Verdict v;
  size_t count = 0;
  for (uint64_t r = 0; r <= 2; ++r)
    for (uint64_t n = 0; n <= 3; ++n)
      for (uint64_t k = 0; k <= 3 && v.pass; ++k) {
        std::string args = "[" + std::to_string(r) + "," + std::to_string(n) + "," +
                           std::to_string(k) + "]";
        Program p = load("list.tss", "rs", {"main" + args});
        std::string app = mangle("append", {r, n, k});
        std::string want = "l1 : list$" + std::to_string(r) + "$" + std::to_string(n) +
                           ", l2 : ()^" + std::to_string((r + 4) * n + 2) + " list$" +
                           std::to_string(r) + "$" + std::to_string(k) + " |- l : ()^2 list$" +
                           std::to_string(r) + "$" + std::to_string(n + k);
        if (!def_ok(p, app)) v.fail(app + " rejected");
        else if (interface(p, app) != want) v.fail(app + " declared as " + interface(p, app));
        std::vector<oracle::Event> ev;
        for (uint64_t i = 0; i < n + k; ++i) {
          ev.push_back({2 + i * (r + 4), "cons"});
          ev.push_back({3 + i * (r + 4), "send"});
        }
        ev.push_back({2 + (n + k) * (r + 4), "nil"});
        ev.push_back({3 + (n + k) * (r + 4), "close"});
        expect_run(v, p, mangle("main", {r, n, k}), ev);
        ++count;
      }
  if (v.pass) v.detail = std::to_string(count) + " instances typed and timed";
  return v;
}

Verdict alternate_rates() {
  Verdict v;
  for (uint64_t k = 0; k <= 2 && v.pass; ++k) {
    Program p = load("stream.tss", "rs", {"main[" + std::to_string(k) + "]"});
    std::string alt = mangle("alternate", {k});
    std::string in = "stream$" + std::to_string(2 * k + 3);
    std::string want = "l1 : " + in + ", l2 : ()^" + std::to_string(k + 2) + " " + in +
                       " |- l : ()stream$" + std::to_string(k + 1);
    if (!def_ok(p, alt)) v.fail(alt + " rejected");
    else if (interface(p, alt) != want) v.fail(alt + " declared as " + interface(p, alt));
    // stream[j] sends every j+1 ticks.
    std::vector<oracle::Event> ev;
    for (uint64_t i = 0; i < 6; ++i) ev.push_back({1 + i * (k + 2), "send"});
    expect_run(v, p, mangle("main", {k}), ev, true, 2000);
  }
  if (v.pass) v.detail = "output stream[k+1] for k = 0..2";
  return v;
}

Verdict tree_span() {
  Verdict v;
  for (uint64_t h = 0; h <= 4 && v.pass; ++h) {
    std::string inst = "main[" + std::to_string(h) + "]";
    std::string bit = h == 0 ? "b1" : "b0";
    Program rs = load("tree.tss", "rs", {inst});
    expect_run(v, rs, mangle("main", {h}), {{5 * h + 3, bit}, {5 * h + 4, "close"}});
    Program fx = load("tree_xor.tss", "free", {inst});
    std::string node = mangle("node", {h});
    if (!fx.elaborated.find_def(node)) fx = load("tree_xor.tss", "free", {inst, "node[" + std::to_string(h) + "]"});
    std::string want = "l : tree$" + std::to_string(h) + ", r : tree$" + std::to_string(h) +
                       " |- t : tree$" + std::to_string(h + 1);
    if (!def_ok(fx, node) || interface(fx, node) != want) v.fail(node + " (xor-only) not typed at " + want);
    if (fx.env && !type_equal(*fx.env, t_name("tree$" + std::to_string(h)),
                              parse_type("&{ parity : ()^" + std::to_string(h) + " bool }")))
      v.fail("xor-only tree[" + std::to_string(h) + "] differs from &{parity : ()^h bool}");
    expect_run(v, fx, mangle("main", {h}), {{h, bit}, {h, "close"}});
  }
  if (v.pass) v.detail = "RS at 5h+3, xor-only at h, h = 0..4";
  return v;
}

Verdict fold_span() {
  Verdict v;
  std::string bad;
  for (uint64_t k : {0, 2})
    for (uint64_t n = 0; n <= 3; ++n) {
      std::string args = "[" + std::to_string(k) + "," + std::to_string(n) + "]";
      Program p = load("fold.tss", "rs", {"main" + args});
      Verdict one;
      expect_run(one, p, mangle("main", {k, n}), {{(k + 5) * n + 4, "v"}, {(k + 5) * n + 5, "close"}});
      if (!one.pass && bad.empty()) bad = one.detail;
    }
  if (!bad.empty()) {
    v.fail(bad);
    // The same program typed at (k+6)n+4 runs to the letter.
    Verdict alt;
    for (uint64_t k : {0, 2})
      for (uint64_t n = 0; n <= 3; ++n) {
        Program p = load("fold_span.tss", "rs",
                         {"main[" + std::to_string(k) + "," + std::to_string(n) + "]"});
        expect_run(alt, p, mangle("main", {k, n}), {{(k + 6) * n + 4, "v"}, {(k + 6) * n + 5, "close"}});
      }
    v.detail += alt.pass ? " | typed at (k+6)n+4 it typechecks and the result arrives at (k+6)n+4"
                         : " | (k+6)n+4 variant also fails: " + alt.detail;
  } else {
    v.detail = "result at (k+5)n+4";
  }
  return v;
}

struct Universe {
  std::shared_ptr<TypeEnv> env;
  std::vector<TypeP> types;
  std::vector<uint8_t> m;
  size_t size() const { return types.size(); }
  bool at(size_t i, size_t j) const { return m[i * types.size() + j]; }
};

const Universe& universe() {
  static Universe u = [] {
    Universe u;
    u.env = std::make_shared<TypeEnv>(ground_all(parse_program("type S = &{ a : 1, b : 1 }")));
    u.types = enumerate_universe(t_name("S"), 4, 3);
    u.m = subtype_matrix_omp(*u.env, u.types);
    return u;
  }();
  return u;
}

Verdict identity_bridge() {
  Verdict v;
  const Universe& u = universe();
  size_t pairs = u.size() * u.size(), mismatches = 0;
  std::string first;
  std::vector<uint8_t> bridge(pairs);
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < static_cast<long>(u.size()); ++i)
    for (size_t j = 0; j < u.size(); ++j)
      bridge[static_cast<size_t>(i) * u.size() + j] = implicit_forward_ok(*u.env, u.types[static_cast<size_t>(i)], u.types[j]);
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = 0; j < u.size(); ++j)
      if (bridge[i * u.size() + j] != u.at(i, j)) {
        if (!mismatches++) first = to_string(u.types[i]) + " vs " + to_string(u.types[j]);
      }
  if (u.size() < 200 || pairs < 40000) v.fail("universe too small");
  if (mismatches) v.fail(std::to_string(mismatches) + " mismatches, first " + first);
  if (v.pass) v.detail = std::to_string(u.size()) + " types, " + std::to_string(pairs) + " pairs";
  return v;
}

bool shape(const TypeEnv& env, const TypeP& t, TK m) {
  return strip_next(env, t).second->kind == m;
}

Verdict subtype_laws() {
  Verdict v;
  const Universe& u = universe();
  const TypeEnv& env = *u.env;
  size_t n = u.size(), triples = 0;
  for (size_t i = 0; i < n; ++i)
    if (!u.at(i, i)) v.fail("not reflexive at " + to_string(u.types[i]));
  for (size_t a = 0; a < n && v.pass; ++a)
    for (size_t b = 0; b < n && v.pass; ++b) {
      if (!u.at(a, b)) continue;
      for (size_t c = 0; c < n; ++c)
        if (u.at(b, c)) {
          ++triples;
          if (!u.at(a, c)) {
            v.fail("transitivity fails: " + to_string(u.types[a]) + " <= " + to_string(u.types[b]) +
                   " <= " + to_string(u.types[c]));
            break;
          }
        }
    }
  size_t lemma = 0;
  for (size_t a = 0; a < n && v.pass; ++a)
    for (size_t b = 0; b < n && v.pass; ++b) {
      const TypeP &A = u.types[a], &B = u.types[b];
      if (u.at(a, b) && shape(env, B, TK::Box) && !shape(env, A, TK::Box))
        v.fail("patience (box) fails at " + to_string(A) + " <= " + to_string(B));
      if (u.at(a, b) && shape(env, A, TK::Diamond) && !shape(env, B, TK::Diamond))
        v.fail("patience (diamond) fails at " + to_string(A) + " <= " + to_string(B));
      if (shape(env, A, TK::Box) && is_subtype(env, t_next(1, A), B) && !is_subtype(env, A, B))
        v.fail("impatience (box) fails at " + to_string(A) + ", " + to_string(B));
      if (shape(env, B, TK::Diamond) && is_subtype(env, A, t_next(1, B)) && !is_subtype(env, A, B))
        v.fail("impatience (diamond) fails at " + to_string(A) + ", " + to_string(B));
      ++lemma;
    }
  if (v.pass)
    v.detail = std::to_string(triples) + " transitive triples, " + std::to_string(lemma) +
               " pairs for the patience lemmas";
  return v;
}

struct RunStats {
  size_t runs = 0, steps = 0;
  std::vector<std::string> preservation, progress;
};

const RunStats& corpus_runs() {
  static RunStats st = [] {
    RunStats st;
    auto manifest = nlohmann::json::parse(read_file(kCorpus + "/manifest.json"));
    for (auto& e : manifest.at("programs")) {
      std::vector<std::string> inst;
      for (auto& r : e.value("runs", nlohmann::json::array())) inst.push_back(r.at("main"));
      if (inst.empty()) continue;
      Program p = load(e.at("file"), e.value("cost", "free"), inst, e.value("explicit", false));
      for (auto& m : inst) {
        std::string main = m;
        if (m.find('[') != std::string::npos) {
          auto [nm, args] = parse_instance(m);
          main = mangle(nm, args);
        }
        for (auto& s : all_schedulers()) {
          CheckedRun cr = run_checked(p, main, s, 10000, true);
          ++st.runs;
          st.steps += cr.result.steps;
          std::string tag = e.at("name").get<std::string>() + " " + m + " " + to_string(s) + ": ";
          if (cr.preservation) st.preservation.push_back(tag + *cr.preservation);
          if (cr.progress) st.progress.push_back(tag + *cr.progress);
        }
      }
    }
    return st;
  }();
  return st;
}

Verdict preservation() {
  Verdict v;
  const RunStats& st = corpus_runs();
  if (!st.preservation.empty())
    v.fail(std::to_string(st.preservation.size()) + " violations, first " + st.preservation[0]);
  else
    v.detail = std::to_string(st.runs) + " runs, " + std::to_string(st.steps) + " checked steps";
  return v;
}

Verdict progress() {
  Verdict v;
  const RunStats& st = corpus_runs();
  if (!st.progress.empty())
    v.fail(std::to_string(st.progress.size()) + " violations, first " + st.progress[0]);
  else
    v.detail = std::to_string(st.runs) + " runs, all quiescent states poised";
  return v;
}

Verdict round_trip() {
  Verdict v;
  auto manifest = nlohmann::json::parse(read_file(kCorpus + "/manifest.json"));
  size_t n = 0;
  for (auto& e : manifest.at("programs")) {
    if (e.value("explicit", false)) continue;
    std::vector<std::string> inst = e.value("instances", std::vector<std::string>{});
    for (auto& r : e.value("runs", nlohmann::json::array())) inst.push_back(r.at("main"));
    Program p = load(e.at("file"), e.value("cost", "free"), inst);
    auto reject = e.value("reject", std::vector<std::string>{});
    std::set<std::string> rejected(reject.begin(), reject.end());
    for (auto& x : p.check_errors)
      if (!rejected.count(x.def)) v.fail(e.at("name").get<std::string>() + ": elaborated " + x.def + " fails the explicit check");
    for (auto& x : p.elab_errors)
      if (!rejected.count(x.def)) v.fail(e.at("name").get<std::string>() + ": " + x.def + " not reconstructed");
    std::string diff = round_trip_diff(p);
    if (!diff.empty()) v.fail(e.at("name").get<std::string>() + ": " + diff);
    ++n;
  }
  if (v.pass) v.detail = std::to_string(n) + " programs";
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  const Universe& u = universe();
  oracle::Subtype leq;
  size_t mismatches = 0;
  std::string first;
  for (size_t i = 0; i < u.size(); ++i)
    for (size_t j = 0; j < u.size(); ++j)
      if (leq(oracle::word(u.types[i]), oracle::word(u.types[j])) != u.at(i, j))
        if (!mismatches++) first = to_string(u.types[i]) + " vs " + to_string(u.types[j]);
  std::vector<uint8_t> serial = subtype_matrix_serial(*u.env, u.types);
  if (serial != u.m) v.fail("serial and parallel matrices differ");
  if (mismatches) v.fail(std::to_string(mismatches) + " mismatches, first " + first);
  if (v.pass) v.detail = std::to_string(u.size() * u.size()) + " pairs agree";
  return v;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
    bool known_red;  // recorded as unattainable; reported but not fatal
  };
  std::vector<Criterion> cs = {
      {"six trace", six_trace, false},
      {"golden verdicts", golden_verdicts, false},
      {"stack vs queue response", stack_queue, false},
      {"append rates", append_rates, false},
      {"alternate rates", alternate_rates, false},
      {"tree span", tree_span, false},
      {"fold span (k+5)n+4", fold_span, true},
      {"subtyping identity", identity_bridge, false},
      {"subtyping laws", subtype_laws, false},
      {"preservation", preservation, false},
      {"progress", progress, false},
      {"reconstruction round trip", round_trip, false},
      {"subtyping oracle equivalence", oracle_equivalence, false},
  };
  int unexpected = 0, i = 0;
  for (auto& c : cs) {
    auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (std::exception& e) {
      v.fail(std::string("exception: ") + e.what());
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-4s %2d %-30s %6.2fs  %s\n", v.pass ? "PASS" : "FAIL", ++i, c.name, s,
                v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass && !c.known_red) ++unexpected;
  }
  std::fflush(stdout);
  return unexpected == 0 ? 0 : 1;
}
