#include <gtest/gtest.h>

#include "support.h"

using namespace tss;

namespace {

const std::string kCopy = std::string(testing_support::kBits) +
                          "decl copy : (y : bits) |- (x : ()bits)\n"
                          "proc x <- copy <- y =\n"
                          "  case y ( b0 => x.b0 ; x <- copy <- y\n"
                          "         | b1 => x.b1 ; x <- copy <- y\n"
                          "         | $ => x.$ ; wait y ; close x )\n";

size_t ticks(const ProcP& p) {
  if (!p) return 0;
  size_t n = p->kind == PK::Delay && p->origin == Origin::Tick;
  n += ticks(p->cont) + ticks(p->body);
  for (auto& [l, b] : p->branches) n += ticks(b);
  return n;
}

size_t count_ticks(const std::string& text, CostModel m, const std::string& def) {
  Signature s = instrument(parse_program(text), m);
  return ticks(s.find_def(def)->clauses[0].body);
}

}  // namespace

TEST(Instrument, ModelsChargeDifferently) {
  EXPECT_EQ(count_ticks(kCopy, CostModel::Free, "copy"), 0u);
  // A tick opens each branch and follows the wait.
  EXPECT_EQ(count_ticks(kCopy, CostModel::R, "copy"), 4u);
  // Each label send is charged too.
  EXPECT_EQ(count_ticks(kCopy, CostModel::RS, "copy"), 7u);
}

TEST(Instrument, CaseBranchesStartWithTick) {
  Signature s = instrument(parse_program(kCopy), CostModel::R);
  for (auto& [label, b] : s.find_def("copy")->clauses[0].body->branches) {
    EXPECT_EQ(b->kind, PK::Delay) << label;
    EXPECT_EQ(b->origin, Origin::Tick) << label;
  }
  Signature rs = instrument(parse_program(kCopy), CostModel::RS);
  ProcP send = rs.find_def("copy")->clauses[0].body->branches[0].second->cont;
  ASSERT_EQ(send->kind, PK::SendLabel);
  EXPECT_EQ(send->cont->kind, PK::Delay);
  EXPECT_EQ(send->cont->origin, Origin::Tick);
}

TEST(Instrument, CloseIsFree) {
  std::string text = "decl u : . |- (x : 1)\nproc x <- u = close x\n";
  EXPECT_EQ(count_ticks(text, CostModel::RS, "u"), 0u);
}

TEST(Instrument, EraseUndoes) {
  Signature s = parse_program(testing_support::corpus("list.tss"));
  for (CostModel m : {CostModel::Free, CostModel::R, CostModel::RS})
    EXPECT_TRUE(same_signature(erase_ticks(instrument(s, m)), s)) << to_string(m);
}

TEST(Instrument, SourceTicks) {
  std::string text = "decl u : . |- (x : ()1)\nproc x <- u = tick ; close x\n";
  EXPECT_EQ(count_ticks(text, CostModel::Free, "u"), 1u);
}

TEST(CostModels, Names) {
  EXPECT_EQ(parse_cost_model("rs"), CostModel::RS);
  EXPECT_EQ(to_string(parse_cost_model(to_string(CostModel::R))), to_string(CostModel::R));
  EXPECT_THROW(parse_cost_model("linear"), std::invalid_argument);
}
