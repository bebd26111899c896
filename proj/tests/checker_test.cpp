#include <gtest/gtest.h>

#include "support.h"

using namespace tss;
using testing_support::env_of;

namespace {

std::optional<TypeError> check(const std::string& types, const std::string& ctx_text,
                               const std::string& proc, const std::string& offer) {
  TypeEnv env = env_of(types);
  Signature s = parse_program(types + "decl p : " + ctx_text + " |- (x : " + offer +
                              ")\nproc x <- p" + (ctx_text == "." ? "" : " <- y") + " = " +
                              proc + "\n");
  auto [ctx, off] = definition_interface(s, "p");
  return check_process(env, ctx, s.find_def("p")->clauses[0].body, off);
}

}  // namespace

TEST(Explicit, AcceptsTimedProcesses) {
  EXPECT_FALSE(check("", ".", "delay ; close x", "()1"));
  EXPECT_FALSE(check("", ".", "delay{3} ; close x", "()^3 1"));
  EXPECT_FALSE(check("", "(y : ()1)", "delay ; wait y ; close x", "()1"));
  EXPECT_FALSE(check("", "(y : []1)", "delay{2} ; now! y ; wait y ; close x", "()()1"));
  EXPECT_FALSE(check("", "(y : 1)", "wait y ; now! x ; close x", "<>1"));
  EXPECT_FALSE(check("", "(y : <>1)", "when? y ; wait y ; now! x ; close x", "<>1"));
  EXPECT_FALSE(check("", "(y : 1)", "wait y ; delay ; now! x ; close x", "<>1"));
}

TEST(Explicit, RejectsMistimedProcesses) {
  auto e = check("", ".", "close x", "()1");
  ASSERT_TRUE(e);
  e = check("", "(y : ()1)", "wait y ; close x", "1");
  ASSERT_TRUE(e);
  e = check("", "(y : <>1)", "delay ; wait y ; close x", "()1");
  ASSERT_TRUE(e);
  e = check("", "(y : []1)", "delay ; wait y ; close x", "()1");
  ASSERT_TRUE(e);
  e = check("", "(y : []1)", "when? y ; wait y ; close x", "1");
  ASSERT_TRUE(e);
}

TEST(Explicit, LinearityAndLabels) {
  auto e = check("", "(y : 1)", "close x", "1");
  ASSERT_TRUE(e);
  EXPECT_FALSE(e->render().empty());
  e = check("", ".", "x.c ; close x", "+{ a : 1 }");
  ASSERT_TRUE(e);
  EXPECT_NE(e->render().find("c"), std::string::npos);
}

TEST(Explicit, ForwardNeedsEqualTypes) {
  EXPECT_FALSE(check("", "(y : ()1)", "x <- y", "()1"));
  auto e = check("", "(y : 1)", "x <- y", "()1");
  ASSERT_TRUE(e);
  EXPECT_EQ(e->rule, "id");
}

TEST(Signatures, CounterChecksAndParallelAgrees) {
  Program p = testing_support::load(testing_support::corpus("counter.tss"), CostModel::R, {}, true);
  EXPECT_TRUE(p.ok()) << (p.ok() ? "" : p.diagnostics()[0]);
  EXPECT_TRUE(check_signature(*p.env).empty());
  EXPECT_TRUE(check_signature_omp(*p.env).empty());
  Program bad =
      testing_support::load(testing_support::corpus("plus1_forward.tss"), CostModel::R, {}, true);
  auto serial = check_signature(*bad.env), par = check_signature_omp(*bad.env);
  ASSERT_EQ(serial.size(), par.size());
  for (size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(serial[i].render(), par[i].render());
}

TEST(Signatures, InterfaceSequent) {
  Signature s = parse_program(testing_support::corpus("bits.tss"));
  auto [ctx, offer] = definition_interface(s, "plus2");
  EXPECT_EQ(show_sequent(ctx, offer), "y : bits |- x : ()^2 bits");
}
