#include <gtest/gtest.h>

#include <chrono>

#include "anfj/concrete.hpp"
#include "anfj/errors.hpp"
#include "support/corpus.hpp"

using namespace anfj;
using namespace anfj::concrete;

namespace {

std::string outcome_tag(const LabeledProgram& lp, const Outcome& o) {
  return std::visit(
      [&](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Halted>) return "halted " + lp.name(k.value.cls);
        else if constexpr (std::is_same_v<K, Uncaught>) return "uncaught " + lp.name(k.value.cls);
        else if constexpr (std::is_same_v<K, Stuck>) return "stuck";
        else return "fuel";
      },
      o.kind);
}

std::set<std::uint64_t> pointers_in(const State& s) {
  std::set<std::uint64_t> out{s.fp.serial()};
  for (const auto& [a, v] : *s.store) {
    out.insert(a.ptr.serial());
    out.insert(v.op.serial());
  }
  for (const KontNode* k = s.kont.get(); k; k = k->next.get())
    std::visit([&](const auto& f) { out.insert(f.fp.serial()); }, k->frame);
  return out;
}

}  // namespace

TEST(Concrete, CorpusOutcomes) {
  auto start = std::chrono::steady_clock::now();
  std::size_t n = 0;
  for (const auto& f : corpus::corpus_files()) {
    auto lp = load_program(corpus::read_file(f));
    auto r = run(lp, 1000);
    EXPECT_EQ(outcome_tag(lp, r.outcome), corpus::expected_outcome(f)) << f;
    ++n;
  }
  EXPECT_GE(n, 20u);
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(1));
}

TEST(Concrete, InjectState) {
  auto lp = corpus::load_corpus("minimal");
  State s = inject(lp);
  EXPECT_EQ(s.stmt, lp.entry().entry);
  EXPECT_TRUE(s.store->empty());
  EXPECT_EQ(s.kont, nullptr);
  EXPECT_EQ(s.time, nullptr);
}

TEST(Concrete, VarRefCopiesBinding) {
  auto lp = corpus::load_corpus("var_ref");
  State s0 = inject(lp);
  State s1 = std::get<State>(step(lp, s0));  // x = new A()
  State s2 = std::get<State>(step(lp, s1));  // y = x
  Symbol x = *lp.symbol("x"), y = *lp.symbol("y");
  EXPECT_EQ(s2.store->at(Addr{y, s2.fp}), s1.store->at(Addr{x, s1.fp}));
  EXPECT_EQ(s2.stmt, *lp.stmt(s1.stmt).succ);
}

TEST(Concrete, ConstructorChain) {
  auto lp = corpus::load_corpus("ctor_chain");
  Pointer op{0, nullptr, kNoLabel};
  Value p{*lp.symbol("P"), Pointer{1, nullptr, kNoLabel}};
  Value q{*lp.symbol("Q"), Pointer{2, nullptr, kNoLabel}};
  auto delta = apply_constructor(lp, *lp.symbol("C"), op, {p, q, q});
  std::map<std::string, Value> byField;
  for (auto& [a, v] : delta) {
    EXPECT_EQ(a.ptr, op);
    byField.emplace(lp.name(a.base), v);
  }
  ASSERT_EQ(byField.size(), 3u);
  EXPECT_EQ(byField.at("f"), p);
  EXPECT_EQ(byField.at("g"), q);
  EXPECT_TRUE(apply_constructor(lp, lp.object_symbol(), op, {}).empty());
  EXPECT_THROW(apply_constructor(lp, *lp.symbol("C"), op, {p}), ElaborationError);
}

TEST(Concrete, ThrowAndReturnRules) {
  // Throw past a call frame keeps the throw statement and pops one frame.
  auto lp = corpus::load_corpus("throw_past_return");
  auto r = run(lp, 1000, true);
  bool sawPastReturn = false;
  for (std::size_t i = 0; i + 1 < r.trace.size(); ++i) {
    const State& a = r.trace[i];
    const State& b = r.trace[i + 1];
    if (lp.stmt(a.stmt).is_throw() && b.stmt == a.stmt) {
      EXPECT_EQ(kont_depth(b.kont) + 1, kont_depth(a.kont));
      EXPECT_TRUE(std::holds_alternative<FunFrame>(a.kont->frame));
      sawPastReturn = true;
    }
  }
  EXPECT_TRUE(sawPastReturn);

  auto lp2 = corpus::load_corpus("return_over_handler");
  auto r2 = run(lp2, 1000, true);
  bool sawOverHandler = false;
  for (std::size_t i = 0; i + 1 < r2.trace.size(); ++i) {
    const State& a = r2.trace[i];
    const State& b = r2.trace[i + 1];
    if (lp2.stmt(a.stmt).is_return() && b.stmt == a.stmt) {
      EXPECT_TRUE(std::holds_alternative<HandleFrame>(a.kont->frame));
      sawOverHandler = true;
    }
  }
  EXPECT_TRUE(sawOverHandler);
}

TEST(Concrete, TraceProperties) {
  for (const auto& f : corpus::corpus_files()) {
    auto lp = load_program(corpus::read_file(f));
    auto r = run(lp, 400, true);
    for (std::size_t i = 0; i + 1 < r.trace.size(); ++i) {
      const State& a = r.trace[i];
      const State& b = r.trace[i + 1];
      // Stack discipline.
      auto da = kont_depth(a.kont), db = kont_depth(b.kont);
      EXPECT_LE(da > db ? da - db : db - da, 1u) << f;
      // Freshness: a newly allocated pointer never appears in the prior state.
      std::uint64_t fresh = b.time->serial;
      EXPECT_FALSE(pointers_in(a).count(fresh)) << f;
      // Handler matching on catch transitions.
      if (lp.stmt(a.stmt).is_throw() && b.stmt != a.stmt) {
        const auto& h = std::get<HandleFrame>(a.kont->frame);
        const auto& t = std::get<syn::Throw>(lp.stmt(a.stmt).kind);
        EXPECT_TRUE(lp.subtype(a.store->at(Addr{t.var, a.fp}).cls, h.cls)) << f;
      }
    }
  }
}

TEST(Concrete, FuelAndDeepRecursion) {
  auto lp = corpus::load_corpus("recursion_infinite");
  auto r = run(lp, kDefaultFuel);
  EXPECT_TRUE(std::holds_alternative<FuelExhausted>(r.outcome.kind));
  EXPECT_EQ(r.outcome.steps, kDefaultFuel);
}

TEST(Concrete, StuckOnUnboundRead) {
  auto lp = corpus::load_corpus("stuck_unbound");
  auto r = run(lp);
  ASSERT_TRUE(std::holds_alternative<Stuck>(r.outcome.kind));
  EXPECT_NE(std::get<Stuck>(r.outcome.kind).reason.find("unbound 'x'"), std::string::npos);
}
