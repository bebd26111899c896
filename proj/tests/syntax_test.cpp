#include <gtest/gtest.h>

#include "support.h"

using namespace tss;

TEST(Types, ParsePrintRoundTrip) {
  for (const char* s : {"1", "+{ a : 1, b : ()1 }", "&{ x : []A -o ()A }", "()^3 <>bits",
                        "[]()A * 1", "list[2, 3]"}) {
    TypeP t = parse_type(s);
    EXPECT_TRUE(same_type(t, parse_type(to_string(t)))) << s;
  }
}

TEST(Types, NextCountersMerge) {
  TypeP t = t_next(2, t_next(3, t_one()));
  ASSERT_EQ(t->kind, TK::Next);
  EXPECT_EQ(t->n, 5u);
  EXPECT_TRUE(same_type(t_next(0, t_one()), t_one()));
  EXPECT_TRUE(same_type(parse_type("()^2 ()1"), parse_type("()()()1")));
}

TEST(Types, SymbolicCountParses) {
  TypeP t = parse_type("()^{2*n+1} A");
  ASSERT_EQ(t->kind, TK::Next);
  ASSERT_TRUE(t->count);
  EXPECT_EQ(eval(t->count, {{"n", 3}}), 7u);
  EXPECT_FALSE(type_ground(t));
}

TEST(Programs, ParsesCorpusAndReprints) {
  for (const char* f : {"bits.tss", "list.tss", "tree.tss", "counter.tss", "queue.tss"}) {
    Signature s = parse_program(testing_support::corpus(f));
    Signature again = parse_program(pretty_print(s));
    EXPECT_TRUE(same_signature(s, again)) << f;
  }
}

TEST(Programs, ProcessShapes) {
  Signature s = parse_program(std::string(testing_support::kBits) +
                              "decl six : . |- (x : bits)\n"
                              "proc x <- six = x.b0 ; x.b1 ; close x\n");
  const ProcDef* d = s.find_def("six");
  ASSERT_NE(d, nullptr);
  ProcP p = d->clauses[0].body;
  EXPECT_EQ(p->kind, PK::SendLabel);
  EXPECT_EQ(p->label, "b0");
  EXPECT_EQ(p->cont->cont->kind, PK::Close);
}

TEST(Programs, ErrorsCarryPositions) {
  try {
    parse_program("type bits = +{ b0 : ()bits\n");
    FAIL() << "accepted";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.pos.line, 2);
  }
  EXPECT_THROW(parse_type("+{ a : }"), ParseError);
  EXPECT_THROW(parse_type("()^ A"), ParseError);
}

TEST(Programs, FreeChannelsAndRename) {
  ProcP p = p_spawn("z", "f", {}, {"y"}, p_fwd("x", "z"));
  auto fc = free_channels(p);
  std::sort(fc.begin(), fc.end());
  EXPECT_EQ(fc, (std::vector<std::string>{"x", "y"}));
  ProcP q = rename(p, "y", "w");
  EXPECT_EQ(q->chans[0], "w");
  EXPECT_FALSE(same_proc(p, q));
}

TEST(Instantiate, GroundsReachableDefinitions) {
  Signature s = parse_program(testing_support::corpus("list.tss"));
  std::string root;
  Signature g = instantiate_call(s, "append", {1, 2, 0}, &root);
  EXPECT_EQ(root, mangle("append", {1, 2, 0}));
  EXPECT_TRUE(g.ground());
  EXPECT_NE(g.find_def("append$1$1$0"), nullptr);
  EXPECT_NE(g.find_def("append$1$0$0"), nullptr);
  EXPECT_NE(g.find_type("list$1$2"), nullptr);
}

TEST(Instantiate, PatternsSelectClauses) {
  Signature s = parse_program(testing_support::corpus("list.tss"));
  Signature g = instantiate(s, "gen", {{"r", 0}, {"n", 0}});
  const ProcDef* d = g.find_def(mangle("gen", {0, 0}));
  ASSERT_NE(d, nullptr);
  EXPECT_EQ(d->clauses[0].body->kind, PK::SendLabel);
  EXPECT_EQ(d->clauses[0].body->label, "nil");
}

TEST(Instantiate, MissingParameterIsAnError) {
  Signature s = parse_program(testing_support::corpus("list.tss"));
  EXPECT_THROW(instantiate(s, "gen", {{"r", 0}}), EvalError);
}

TEST(ParamExprs, Evaluate) {
  PExprP e = padd(pmul(pconst(3), pvar("n")), pconst(2));
  EXPECT_EQ(eval(e, {{"n", 4}}), 14u);
  EXPECT_FALSE(pexpr_ground(e));
  EXPECT_TRUE(pexpr_equal(e, e));
  EXPECT_THROW(eval(pvar("m"), {}), EvalError);
}
