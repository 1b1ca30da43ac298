#include <gtest/gtest.h>

#include <regex>

#include "anfj/concrete.hpp"
#include "anfj/export.hpp"
#include "anfj/metrics.hpp"
#include "support/corpus.hpp"

using namespace anfj;
using namespace anfj::abstract;
using namespace anfj::metrics;

namespace {

Policy finite(int k) {
  Policy p;
  p.mode = Mode::Finite;
  p.k = k;
  return p;
}

Policy at_k(int k) {
  Policy p;
  p.k = k;
  return p;
}

// Cardinality of a variable across the union of node stores.
std::map<std::string, std::size_t> var_cardinality(const LabeledProgram& lp, const DSG& g) {
  std::map<std::string, std::size_t> out;
  for (const auto& [a, vs] : points_to(g)) {
    auto& n = out[lp.name(a.base)];
    n = std::max(n, vs.size());
  }
  return out;
}

const char* kTwoExceptions = R"(
class E1 extends Object { E1() { super(); } }
class E2 extends Object { E2() { super(); } }
class A extends Object { A() { super(); } }
class Main extends Object {
  Main() { super(); }
  Object main() {
    Object e; A a;
    a = new A();
    e = new E1();
    e = new E2();
    throw e;
  }
}
)";

}  // namespace

TEST(Export, JsonRoundTrip) {
  for (const auto& file : corpus::corpus_files()) {
    auto lp = load_program(corpus::read_file(file));
    for (Policy p : {Policy{}, at_k(1), finite(0)}) {
      DSG g = analyze(lp, p);
      std::string text = to_json(lp, g);
      DSG back = dsg_from_json(lp, text);
      EXPECT_TRUE(same_exported(g, back)) << file;
      EXPECT_EQ(to_json(lp, back), text);
    }
  }
}

TEST(Export, JsonNodesSortedByLabelThenFramePointer) {
  auto lp = corpus::load_corpus("intro_wrapped");
  DSG g = analyze(lp, at_k(1));
  for (std::size_t i = 1; i < g.nodes.size(); ++i) {
    const auto& a = g.nodes[i - 1].state;
    const auto& b = g.nodes[i].state;
    EXPECT_LE(std::tie(a.stmt, a.fp, a.time), std::tie(b.stmt, b.fp, b.time));
  }
  EXPECT_TRUE(std::is_sorted(g.edges.begin(), g.edges.end()));
}

TEST(Export, DotDashesSpanningEpsilon) {
  auto lp = corpus::load_corpus("shape_a_push_pop");
  DSG g = analyze(lp, Policy{});
  std::string dot = to_dot(lp, g);
  EXPECT_EQ(dot.rfind("digraph dsg {", 0), 0u);
  std::size_t spanning = 0;
  for (const auto& e : g.edges) {
    if (!e.summary) continue;
    std::string line = "n" + std::to_string(e.from) + " -> n" + std::to_string(e.to) + " [style=dashed";
    spanning += dot.find(line) != std::string::npos;
  }
  EXPECT_GE(spanning, 1u);
  EXPECT_NE(dot.find("⁺\""), std::string::npos);
  EXPECT_NE(dot.find("⁻\""), std::string::npos);
}

TEST(Metrics, IntroductionLinkCounts) {
  auto direct = corpus::load_corpus("intro_direct");
  EXPECT_EQ(ec_links(direct, analyze(direct, Policy{})).size(), 1u);
  EXPECT_EQ(ec_links(direct, analyze(direct, finite(0))).size(), 2u);

  auto wrapped = corpus::load_corpus("intro_wrapped");
  EXPECT_EQ(ec_links(wrapped, analyze(wrapped, Policy{})).size(), 1u);
  EXPECT_EQ(ec_links(wrapped, analyze(wrapped, finite(1))).size(), 2u);
}

TEST(Metrics, ConcreteLinksAreFoundByTheAnalysis) {
  std::size_t nonEmpty = 0;
  for (const auto& file : corpus::corpus_files()) {
    auto lp = load_program(corpus::read_file(file));
    auto run = concrete::run(lp, 1000, true);
    auto seen = concrete_ec_links(lp, run.trace);
    nonEmpty += !seen.empty();
    for (Policy p : {Policy{}, at_k(1), finite(0), finite(1)}) {
      auto links = ec_links(lp, analyze(lp, p));
      for (const auto& l : seen) EXPECT_TRUE(links.count(l)) << file << " " << format(lp, l);
    }
  }
  EXPECT_GE(nonEmpty, 5u);
}

TEST(Metrics, ConcreteLinkRaisePoint) {
  auto lp = corpus::load_corpus("shape_c_propagation");
  auto links = concrete_ec_links(lp, concrete::run(lp, 1000, true).trace);
  ASSERT_EQ(links.size(), 1u);
  const EcLink& l = *links.begin();
  EXPECT_EQ(l.throwLabel, corpus::label_at(lp, "T.fail", "throw e"));
  EXPECT_FALSE(l.from.local);
  EXPECT_EQ(l.from.site, corpus::label_at(lp, "Main.main", "r = t.fail()"));
  EXPECT_EQ(l.handler, corpus::label_at(lp, "Main.main", "r = c"));
}

TEST(Metrics, GcKeepsIdentityResultsApart) {
  auto lp = corpus::load_corpus("gc_identity");
  auto on = var_cardinality(lp, analyze(lp, Policy{}));
  for (const char* v : {"a1", "a2", "b1", "b2"}) EXPECT_EQ(on[v], 1u) << v;
  Policy off;
  off.gc = false;
  auto card = var_cardinality(lp, analyze(lp, off));
  std::size_t worst = 0;
  for (const char* v : {"a1", "a2", "b1", "b2"}) worst = std::max(worst, card[v]);
  EXPECT_GE(worst, 2u);
}

TEST(Metrics, ThrowsCountsExceptionRoleValues) {
  auto lp = load_program(kTwoExceptions);
  Policy p;
  p.gc = false;
  DSG g = analyze(lp, p);
  EXPECT_EQ(exception_classes(lp, g), (std::set<Symbol>{*lp.symbol("E1"), *lp.symbol("E2")}));
  ASSERT_TRUE(throws(lp, g));
  EXPECT_DOUBLE_EQ(*throws(lp, g), 2.0);
  ASSERT_TRUE(var_points_to(lp, g));
  EXPECT_DOUBLE_EQ(*var_points_to(lp, g), 1.0);
  EXPECT_FALSE(average_links(ec_links(lp, g)));
}

TEST(Metrics, RatiosOfIdenticalPoliciesAreOne) {
  auto lp = corpus::load_corpus("intro_wrapped");
  Report a = report(lp, analyze(lp, Policy{}));
  Report b = report(lp, analyze(lp, Policy{}));
  Ratios r = ratios(a, b);
  for (auto v : {r.varPointsTo, r.avgLinks, r.nodes, r.edges}) {
    ASSERT_TRUE(v);
    EXPECT_DOUBLE_EQ(*v, 1.0);
  }
  Report f = report(lp, analyze(lp, finite(1)));
  EXPECT_DOUBLE_EQ(*ratios(a, f).avgLinks, 2.0);
}

TEST(Metrics, PolicySpec) {
  Policy p = parse_policy("k=2,obj,gc=off,liveness=off,finite,store=per-node");
  EXPECT_EQ(p.k, 2);
  EXPECT_TRUE(p.objSensitivity);
  EXPECT_FALSE(p.gc);
  EXPECT_FALSE(p.liveness);
  EXPECT_EQ(p.mode, Mode::Finite);
  EXPECT_EQ(p.storeMode, StoreMode::PerNode);
  EXPECT_EQ(parse_policy("").k, 0);
  EXPECT_THROW(parse_policy("k=-1"), std::invalid_argument);
  EXPECT_THROW(parse_policy("gc=maybe"), std::invalid_argument);
  EXPECT_THROW(parse_policy("fast"), std::invalid_argument);
}
