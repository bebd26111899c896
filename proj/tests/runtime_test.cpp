#include <gtest/gtest.h>
#include <json.hpp>

#include "support.h"

using namespace tss;

namespace {

std::vector<std::string> trace_of(const Program& p, const std::string& main, Scheduler s) {
  std::vector<std::string> out;
  for (auto& o : root_observations(run_checked(p, main, s, 10000, false).result.final))
    out.push_back(o.what + "@" + std::to_string(o.time));
  return out;
}

}  // namespace

TEST(Run, SixUnderEverySchedule) {
  Program p = testing_support::load(testing_support::corpus("bits.tss"), CostModel::R);
  std::vector<std::string> want = {"b0@0", "b1@1", "b1@2", "$@3", "close@4"};
  for (auto& s : all_schedulers()) EXPECT_EQ(trace_of(p, "six", s), want) << to_string(s);
}

TEST(Run, PipelineAddsLatency) {
  Program p = testing_support::load(testing_support::corpus("bits.tss"), CostModel::R);
  std::vector<std::string> want = {"b1@1", "b1@2", "b1@3", "$@4", "close@5"};
  EXPECT_EQ(trace_of(p, "seven", Scheduler::time_synchronous()), want);
}

TEST(Run, BudgetStopsInfiniteRuns) {
  Program p = testing_support::load(testing_support::corpus("stream.tss"), CostModel::RS,
                                    {"main[1]"});
  ASSERT_TRUE(p.ok());
  Scheduler s = Scheduler::round_robin();
  RunResult r = run(*p.env, init_config(*p.env, mangle("main", {1})), s, 300);
  EXPECT_EQ(r.status, RunStatus::BudgetExhausted);
  EXPECT_EQ(r.steps, 300u);
  EXPECT_EQ(r.trace.size(), 300u);
}

TEST(Run, QuiescentConfigurationsArePoised) {
  Program p = testing_support::load(testing_support::corpus("counter_implicit.tss"), CostModel::R);
  Scheduler s = Scheduler::seeded(3);
  RunResult r = run(*p.env, init_config(*p.env, "main"), s, 10000);
  EXPECT_EQ(r.status, RunStatus::Quiescent);
  EXPECT_TRUE(is_poised(r.final));
}

TEST(Run, ConfigurationsStayTyped) {
  Program p = testing_support::load(testing_support::corpus("queue.tss"), CostModel::RS);
  for (auto& s : all_schedulers()) {
    CheckedRun cr = run_checked(p, "mainQ2", s, 10000, true);
    EXPECT_FALSE(cr.preservation) << *cr.preservation;
    EXPECT_FALSE(cr.progress) << *cr.progress;
  }
}

TEST(Run, IllTypedConfigurationIsCaught) {
  Program p = testing_support::load(testing_support::corpus("bits.tss"), CostModel::R);
  Configuration c = init_config(*p.env, "six");
  Context out = {{c.root, c.ghost.at(c.root)}};
  EXPECT_FALSE(check_configuration(*p.env, {}, c, out));
  Configuration late = c;
  late.objects[0].time = 1;
  EXPECT_TRUE(check_configuration(*p.env, {}, late, out));
  Configuration twice = c;
  twice.objects.push_back(c.objects[0]);
  EXPECT_TRUE(check_configuration(*p.env, {}, twice, out));
}

TEST(Run, IncrementalCheckAgreesWithFullCheck) {
  Program p = testing_support::load(testing_support::corpus("list.tss"), CostModel::RS,
                                    {"main[1,2,2]"});
  const TypeEnv& env = *p.env;
  for (auto& s : all_schedulers()) {
    Configuration c = init_config(env, mangle("main", {1, 2, 2}));
    Context out{{c.root, c.ghost.at(c.root)}};
    ConfigChecker inc(env);
    ASSERT_FALSE(inc.check({}, c, out));
    size_t steps = 0;
    RunResult r = run(env, c, s, 10000, [&](const Configuration& now, const StepRecord& rec) {
      ++steps;
      auto a = inc.advance(now, rec);
      auto b = check_configuration(env, {}, now, out);
      EXPECT_EQ(a.has_value(), b.has_value()) << to_line(rec);
      return !a && !b;
    });
    EXPECT_EQ(r.status, RunStatus::Quiescent);
    EXPECT_EQ(steps, r.steps);
  }
}

TEST(Run, IncrementalCheckCatchesForgedSteps) {
  Program p = testing_support::load(testing_support::corpus("bits.tss"), CostModel::R);
  Configuration c = init_config(*p.env, "six");
  Context out{{c.root, c.ghost.at(c.root)}};
  const SemObj& root = c.objects[0];
  ObjView same{root.kind, root.chan, root.time, "", root.body};

  ConfigChecker dup(*p.env);
  ASSERT_FALSE(dup.check({}, c, out));
  StepRecord twice{"forged", 0, {}, {same}};
  auto e = dup.advance(c, twice);
  ASSERT_TRUE(e);
  EXPECT_NE(std::string(e->what()).find("two objects"), std::string::npos);

  ConfigChecker dangling(*p.env);
  ASSERT_FALSE(dangling.check({}, c, out));
  ObjView fwd{SemObj::Kind::Proc, root.chan, 0, "", p_fwd(root.chan, "nowhere")};
  StepRecord stray{"forged", 0, {same}, {fwd}};
  e = dangling.advance(c, stray);
  ASSERT_TRUE(e);
  EXPECT_NE(std::string(e->what()).find("not provided"), std::string::npos);

  ConfigChecker late(*p.env);
  ASSERT_FALSE(late.check({}, c, out));
  ObjView moved{root.kind, root.chan, 1, "", root.body};
  e = late.advance(c, StepRecord{"forged", 0, {same}, {moved}});
  ASSERT_TRUE(e);
}

TEST(Run, SeededSchedulesReplay) {
  Program p = testing_support::load(testing_support::corpus("sbits.tss"), CostModel::R);
  auto a = run_checked(p, "main", Scheduler::seeded(11), 10000, false).result.trace;
  auto b = run_checked(p, "main", Scheduler::seeded(11), 10000, false).result.trace;
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(to_line(a[i]), to_line(b[i]));
}

TEST(Run, TraceJson) {
  Program p = testing_support::load(testing_support::corpus("bits.tss"), CostModel::R);
  auto r = run_checked(p, "six", Scheduler::round_robin(), 10000, false).result;
  auto j = nlohmann::json::parse(trace_json(r.trace));
  ASSERT_TRUE(j.is_array());
  EXPECT_EQ(j.size(), r.trace.size());
}

TEST(Schedulers, Parse) {
  EXPECT_EQ(parse_scheduler("rr").kind(), SchedKind::RoundRobin);
  EXPECT_EQ(parse_scheduler("sync").kind(), SchedKind::TimeSynchronous);
  EXPECT_EQ(parse_scheduler("random:42").seed(), 42u);
  EXPECT_THROW(parse_scheduler("fifo"), std::invalid_argument);
}
