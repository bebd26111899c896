#include "tss/corpus.h"

#include <algorithm>
#include <json.hpp>
#include <set>

namespace tss {

CheckedRun run_checked(const Program& p, const std::string& main, Scheduler sched, size_t steps,
                       bool check_config) {
  CheckedRun out;
  const TypeEnv& env = *p.env;
  Configuration init = init_config(env, main);
  Context iface{{init.root, init.ghost.at(init.root)}};
  ConfigChecker checker(env);
  if (check_config)
    if (auto e = checker.check({}, init, iface)) out.preservation = std::string("initial: ") + e->what();
  StepHook hook;
  if (check_config)
    hook = [&](const Configuration& c, const StepRecord& r) {
      if (auto e = checker.advance(c, r)) {
        out.preservation = "after " + to_line(r) + ": " + e->what();
        return false;
      }
      return true;
    };
  try {
    out.result = run(env, std::move(init), sched, steps, hook);
    if (out.result.status == RunStatus::Quiescent && !is_poised(out.result.final))
      out.progress = "quiescent configuration is not poised";
  } catch (StuckNotPoised& e) {
    out.progress = e.what();
  }
  return out;
}

std::vector<Scheduler> all_schedulers(uint64_t seed) {
  return {Scheduler::round_robin(), Scheduler::seeded(seed), Scheduler::time_synchronous()};
}

std::string round_trip_diff(const Program& p) {
  std::string a = pretty_print(erase_reconstructed(p.elaborated));
  std::string b = pretty_print(p.instrumented);
  if (a == b) return "";
  size_t i = 0;
  while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
  size_t line = static_cast<size_t>(std::count(b.begin(), b.begin() + static_cast<long>(i), '\n')) + 1;
  return "outputs differ at line " + std::to_string(line);
}

namespace {

std::string show(const std::vector<Observation>& obs) {
  std::string s;
  for (auto& o : obs) s += (s.empty() ? "" : " ") + o.what + "@" + std::to_string(o.time);
  return s;
}

}  // namespace

std::vector<CorpusRow> run_corpus(const std::string& dir, const std::string& filter) {
  nlohmann::json manifest = nlohmann::json::parse(read_file(dir + "/manifest.json"));
  std::vector<CorpusRow> rows;
  for (auto& e : manifest.at("programs")) {
    std::string name = e.at("name");
    if (!filter.empty() && name.find(filter) == std::string::npos) continue;
    PipelineOptions opts;
    opts.cost = parse_cost_model(e.value("cost", "free"));
    opts.explicit_mode = e.value("explicit", false);
    opts.instances = e.value("instances", std::vector<std::string>{});
    for (auto& r : e.value("runs", nlohmann::json::array())) {
      std::string m = r.at("main");
      if (m.find('[') != std::string::npos) opts.instances.push_back(m);
    }
    Program p;
    try {
      p = load_program(read_file(dir + "/" + e.at("file").get<std::string>()), opts);
    } catch (std::exception& ex) {
      rows.push_back({name, "load", false, ex.what()});
      continue;
    }
    std::set<std::string> failing;
    for (auto& x : p.elab_errors) failing.insert(x.def);
    for (auto& x : p.check_errors) failing.insert(x.def);
    auto expected = e.value("reject", std::vector<std::string>{});
    std::set<std::string> want(expected.begin(), expected.end());
    std::string detail;
    for (auto& d : p.diagnostics()) detail += (detail.empty() ? "" : "; ") + d;
    rows.push_back({name, "verdict", failing == want, failing == want ? "" : detail});
    if (!opts.explicit_mode) {
      std::string diff = round_trip_diff(p);
      rows.push_back({name, "round-trip", diff.empty(), diff});
    }
    for (auto& r : e.value("runs", nlohmann::json::array())) {
      std::string main = r.at("main");
      size_t steps = r.value("steps", 10000);
      std::vector<Observation> want_obs;
      for (auto& o : r.value("observe", nlohmann::json::array()))
        want_obs.push_back({"", o.at(0).get<uint64_t>(), o.at(1).get<std::string>()});
      bool exact = r.value("exact", true);
      std::string main_name = main;
      if (main.find('[') != std::string::npos) {
        auto [n, args] = parse_instance(main);
        main_name = mangle(n, args);
      }
      for (auto& s : all_schedulers()) {
        std::string check = "run " + main + " " + to_string(s);
        CheckedRun cr;
        try {
          cr = run_checked(p, main_name, s, steps, true);
        } catch (std::exception& ex) {
          rows.push_back({name, check, false, ex.what()});
          continue;
        }
        std::string why;
        if (cr.preservation) why = "preservation: " + *cr.preservation;
        else if (cr.progress) why = "progress: " + *cr.progress;
        auto obs = root_observations(cr.result.final);
        bool match = exact ? obs.size() == want_obs.size() : obs.size() >= want_obs.size();
        for (size_t i = 0; match && i < want_obs.size(); ++i)
          match = obs[i].time == want_obs[i].time && obs[i].what == want_obs[i].what;
        if (why.empty() && !match) why = "observed " + show(obs) + ", expected " + show(want_obs);
        rows.push_back({name, check, why.empty(), why});
      }
    }
  }
  return rows;
}

}  // namespace tss
