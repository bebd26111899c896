#include <gtest/gtest.h>

#include "support.h"

using namespace tss;

namespace {

size_t reconstructed(const ProcP& p) {
  if (!p) return 0;
  size_t n = p->origin == Origin::Reconstructed;
  n += reconstructed(p->cont) + reconstructed(p->body);
  for (auto& [l, b] : p->branches) n += reconstructed(b);
  return n;
}

}  // namespace

TEST(Reconstruct, InsertsDelaysForCopy) {
  Program p = testing_support::load(testing_support::corpus("bits.tss"), CostModel::R);
  ASSERT_TRUE(p.ok());
  EXPECT_EQ(reconstructed(p.instrumented.find_def("copy")->clauses[0].body), 0u);
  EXPECT_GT(reconstructed(p.elaborated.find_def("plus2")->clauses[0].body), 0u);
  EXPECT_TRUE(check_signature(*p.env).empty());
}

TEST(Reconstruct, WhenAndNowForCompress) {
  Program p = testing_support::load(testing_support::corpus("sbits.tss"), CostModel::R);
  ASSERT_TRUE(p.ok()) << p.diagnostics()[0];
  std::string s = print_proc(p.elaborated.find_def("skip1s")->clauses[0].body);
  EXPECT_NE(s.find("now!"), std::string::npos) << s;
  std::string c = print_proc(
      testing_support::load(testing_support::corpus("counter_implicit.tss"), CostModel::R)
          .elaborated.find_def("bit0")->clauses[0].body);
  EXPECT_NE(c.find("when?"), std::string::npos) << c;
}

TEST(Reconstruct, ErasureRestoresSource) {
  for (const char* f : {"bits.tss", "sbits.tss", "counter_implicit.tss", "stack.tss"}) {
    Program p = testing_support::load(testing_support::corpus(f),
                                      std::string(f) == "stack.tss" ? CostModel::RS : CostModel::R);
    EXPECT_TRUE(round_trip_diff(p).empty()) << f;
    EXPECT_EQ(pretty_print(erase_reconstructed(p.elaborated)), pretty_print(p.instrumented)) << f;
  }
}

TEST(Reconstruct, TemporalFailureReportsDeepestGoal) {
  Program p = testing_support::load(testing_support::corpus("plus1_forward.tss"), CostModel::R);
  ASSERT_EQ(p.elab_errors.size(), 1u);
  EXPECT_EQ(p.elab_errors[0].def, "plus1");
  EXPECT_EQ(p.elab_errors[0].kind, ElabError::Kind::Reconstruction);
  EXPECT_NE(p.elab_errors[0].message.find("y : bits |- x : ()bits"), std::string::npos)
      << p.elab_errors[0].message;
}

TEST(Reconstruct, SkeletonFailureIsTypeError) {
  std::string text = std::string(testing_support::kBits) +
                     "decl bad : (y : bits) |- (x : bits)\nproc x <- bad <- y = x.b2 ; x <- y\n";
  Program p = testing_support::load(text, CostModel::R);
  ASSERT_EQ(p.elab_errors.size(), 1u);
  EXPECT_EQ(p.elab_errors[0].kind, ElabError::Kind::Type);
}

TEST(Reconstruct, ImplicitForward) {
  TypeEnv env = testing_support::env_of("type S = &{ a : 1 }\n");
  auto ok = [&](const char* a, const char* b) {
    return implicit_forward_ok(env, parse_type(a), parse_type(b));
  };
  EXPECT_TRUE(ok("S", "S"));
  EXPECT_TRUE(ok("[]S", "()()S"));
  EXPECT_TRUE(ok("S", "<>S"));
  EXPECT_FALSE(ok("S", "()S"));
  EXPECT_FALSE(ok("<>S", "S"));
}

TEST(Reconstruct, EraseModalities) {
  EXPECT_TRUE(same_type(erase_modalities(parse_type("()[]<>()1 * ()1")), parse_type("1 * 1")));
}
