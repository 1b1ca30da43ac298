#include <gtest/gtest.h>

#include <map>
#include <set>

#include "anfj/errors.hpp"
#include "anfj/parser.hpp"
#include "anfj/program.hpp"
#include "support/corpus.hpp"

using namespace anfj;

namespace {

const char* kMinimal = R"(
class A extends Object { A() { super(); } }
class Main extends Object { Main() { super(); } A main() { A a; a = new A(); return a; } }
)";

std::string with_main(const std::string& classes, const std::string& body) {
  return classes + "\nclass Main extends Object { Main() { super(); } Object main() { " +
         body + " } }";
}

Label find_label(const LabeledProgram& lp, const std::string& needle) {
  for (const auto& s : lp.statements())
    if (lp.describe(s.label).find(needle) != std::string::npos) return s.label;
  return kNoLabel;
}

}  // namespace

TEST(Parser, MinimalProgram) {
  auto p = parse_program(kMinimal);
  ASSERT_EQ(p.classes.size(), 2u);
  EXPECT_EQ(p.classes[0].name, "A");
  EXPECT_FALSE(p.entry.has_value());
}

TEST(Parser, RejectsNonAtomicArgument) {
  try {
    parse_program(with_main("", "Object v; v = f.foo(b.bar());"));
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_NE(std::string(e.what()).find("non-atomic argument"), std::string::npos);
    EXPECT_EQ(e.pos().line, 2);
  }
}

TEST(Parser, RejectsDuplicateClass) {
  EXPECT_THROW(parse_program("class A extends Object { A() { super(); } }\n"
                             "class A extends Object { A() { super(); } }"),
               SyntaxError);
}

TEST(Parser, ReportsLineAndColumn) {
  try {
    parse_program("class A extends Object {\n  A() { super() }\n}");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.pos().line, 2);
    EXPECT_EQ(e.pos().column, 17);
  }
}

TEST(Parser, RejectsNestedFieldAccess) {
  EXPECT_THROW(parse_program(with_main("", "Object v; v = a.b.c; return v;")), SyntaxError);
}

TEST(Parser, EntryDeclaration) {
  auto p = parse_program(std::string("entry Main.start;\n") +
                         "class Main extends Object { Main() { super(); } "
                         "Object start() { Main m; m = new Main(); return m; } }");
  ASSERT_TRUE(p.entry);
  EXPECT_EQ(p.entry->method, "start");
  auto lp = elaborate(p);
  EXPECT_EQ(lp.name(lp.entry().name), "start");
}

TEST(Elaborate, LinearSuccessor) {
  auto lp = load_program(with_main("", "Object v; Main w; w = new Main(); v = w; return v;"));
  const Method& m = lp.entry();
  ASSERT_EQ(m.labels.size(), 3u);
  EXPECT_EQ(lp.succ(m.labels[0])->label, m.labels[1]);
  EXPECT_EQ(lp.succ(m.labels[1])->label, m.labels[2]);
  EXPECT_EQ(lp.succ(m.labels[2]), nullptr);
  EXPECT_THROW(lp.succ(999), LookupError);
}

TEST(Elaborate, TryInsertsPopHandler) {
  auto lp = corpus::load_corpus("try_no_throw");
  const Method& m = lp.entry();
  const Stmt& tr = lp.stmt(m.entry);
  const auto& t = std::get<syn::Try>(tr.kind);
  ASSERT_EQ(t.body.size(), 1u);
  const Stmt* after = lp.succ(t.body.back());
  ASSERT_NE(after, nullptr);
  EXPECT_TRUE(std::holds_alternative<syn::PopHandler>(after->kind));
  EXPECT_EQ(after->label, t.popHandler);
  // The statement after the whole try/catch is the return.
  ASSERT_NE(lp.succ(t.popHandler), nullptr);
  EXPECT_TRUE(lp.succ(t.popHandler)->is_return());
  EXPECT_EQ(lp.succ(t.handler.back())->label, lp.succ(t.popHandler)->label);
  EXPECT_EQ(t.handlerHead, t.handler.front());
}

TEST(Elaborate, LabelsUniqueAndSuccStaysInMethod) {
  for (const auto& f : corpus::corpus_files()) {
    auto lp = load_program(corpus::read_file(f));
    std::set<Label> seen;
    for (const auto& s : lp.statements()) {
      EXPECT_TRUE(seen.insert(s.label).second);
      if (s.succ) EXPECT_EQ(lp.stmt(*s.succ).method, s.method) << f;
      if (s.is_return() || s.is_throw()) EXPECT_FALSE(s.succ);
    }
  }
}

TEST(Elaborate, Deterministic) {
  auto src = corpus::read_file(corpus::corpus_dir() / "nested_try.anfj");
  auto a = load_program(src), b = load_program(src);
  ASSERT_EQ(a.num_labels(), b.num_labels());
  for (Label l = 0; l < static_cast<Label>(a.num_labels()); ++l) {
    EXPECT_EQ(a.describe(l), b.describe(l));
    EXPECT_EQ(a.stmt(l).succ, b.stmt(l).succ);
  }
}

TEST(Elaborate, InheritedFieldsFlattened) {
  auto lp = corpus::load_corpus("ctor_chain");
  const ClassInfo& c = lp.class_lookup("C");
  std::vector<std::string> names;
  for (Symbol f : c.fields) names.push_back(lp.name(f));
  EXPECT_EQ(names, (std::vector<std::string>{"f", "g", "h"}));
  EXPECT_TRUE(lp.class_lookup("Object").fields.empty());
  EXPECT_THROW(lp.class_lookup("Nope"), LookupError);
}

TEST(Elaborate, MethodLookupAndSubtype) {
  auto lp = corpus::load_corpus("dispatch");
  Symbol A = *lp.symbol("A"), B = *lp.symbol("B"), make = *lp.symbol("make");
  EXPECT_EQ(lp.method_lookup(B, make).cls, B);
  EXPECT_EQ(lp.method_lookup(A, make).cls, A);
  EXPECT_THROW(lp.method_lookup(*lp.symbol("X"), make), LookupError);
  EXPECT_TRUE(lp.subtype(B, A));
  EXPECT_FALSE(lp.subtype(A, B));
  EXPECT_TRUE(lp.subtype(A, A));
  EXPECT_TRUE(lp.subtype(B, lp.object_symbol()));

  auto lp2 = corpus::load_corpus("inherited_method");
  Symbol B2 = *lp2.symbol("B"), A2 = *lp2.symbol("A");
  EXPECT_EQ(lp2.method_lookup(B2, *lp2.symbol("make")).cls, A2);
}

TEST(Elaborate, StaticErrors) {
  const std::string a = "class A extends Object { A() { super(); } }";
  EXPECT_THROW(load_program("class A extends B { A() { super(); } }\n"
                            "class B extends A { B() { super(); } }"),
               ElaborationError);
  EXPECT_THROW(load_program(with_main(a, "Object v; v = new Q(); return v;")),
               ElaborationError);
  EXPECT_THROW(load_program(with_main(a, "Object v; v = u; return v;")), ElaborationError);
  EXPECT_THROW(load_program(with_main(a, "A v; Object w; v = new A(); w = v.nope; return w;")),
               ElaborationError);
  EXPECT_THROW(load_program(with_main(a, "A v; Object w; v = new A(); w = v.nope(); return w;")),
               ElaborationError);
  // Field shadowing.
  EXPECT_THROW(load_program("class A extends Object { A f; A(A f) { super(); this.f = f; } }\n"
                            "class B extends A { A f; B(A f, A g) { super(f); this.f = g; } }\n" +
                            with_main("", "Object v; return v;")),
               ElaborationError);
  // Falls off the end.
  EXPECT_THROW(load_program(with_main(a, "A v; v = new A();")), ElaborationError);
  // Missing entry.
  EXPECT_THROW(load_program(a), ElaborationError);
  // Super arguments not a prefix of the parameters.
  EXPECT_THROW(load_program("class A extends Object { A f; A(A f) { super(); this.f = f; } }\n"
                            "class B extends A { A g; B(A g, A f) { super(f); this.g = g; } }\n" +
                            with_main("", "Object v; return v;")),
               ElaborationError);
  // Field left unassigned.
  EXPECT_THROW(load_program("class A extends Object { A f; A() { super(); } }\n" +
                            with_main("", "Object v; return v;")),
               ElaborationError);
}

namespace {

// Independent liveness: for each label, v is live iff some path in the
// explicit flow graph reaches a use of v before a definition of v.
std::set<Symbol> brute_live(const LabeledProgram& lp, const Method& m, Label start) {
  std::map<Label, std::vector<Label>> flow;
  for (Label l : m.labels) {
    const Stmt& s = lp.stmt(l);
    if (auto* t = std::get_if<syn::Try>(&s.kind))
      flow[l].push_back(t->body.empty() ? t->popHandler : t->body.front());
    else if (s.succ && !s.is_return() && !s.is_throw())
      flow[l].push_back(*s.succ);
  }
  // Exceptional edges carry the catch variable's definition with them.
  std::map<Label, std::vector<std::pair<Label, Symbol>>> exc;
  for (Label l : m.labels)
    for (Label tl : lp.stmt(l).enclosingTries) {
      const auto& t = std::get<syn::Try>(lp.stmt(tl).kind);
      exc[l].push_back({t.handlerHead, t.catchVar});
    }
  std::set<Symbol> vars(m.params.begin(), m.params.end());
  vars.insert(m.locals.begin(), m.locals.end());
  vars.insert(lp.this_symbol());
  std::set<Symbol> out;
  for (Symbol v : vars) {
    std::set<Label> seen;
    std::vector<Label> work{start};
    bool live = false;
    while (!work.empty() && !live) {
      Label l = work.back();
      work.pop_back();
      if (!seen.insert(l).second) continue;
      const Stmt& s = lp.stmt(l);
      if (uses(lp, s).count(v)) { live = true; break; }
      for (auto [h, cv] : exc[l])
        if (cv != v) work.push_back(h);
      if (defines(s) == v) continue;
      for (Label n : flow[l]) work.push_back(n);
    }
    if (live) out.insert(v);
  }
  return out;
}

}  // namespace

TEST(Liveness, MatchesPathOracleOnCorpus) {
  for (const auto& f : corpus::corpus_files()) {
    auto lp = load_program(corpus::read_file(f));
    for (const auto& m : lp.methods())
      for (Label l : m.labels) EXPECT_EQ(lp.lives(l), brute_live(lp, m, l)) << f << " @" << l;
  }
}

TEST(Liveness, DeadAfterLastUse) {
  auto lp = corpus::load_corpus("gc_dead_variable");
  Symbol b = *lp.symbol("b");
  Label third = find_label(lp, "q = this.negate(p)");
  ASSERT_NE(third, kNoLabel);
  EXPECT_FALSE(lp.lives(third).count(b));
  Label second = find_label(lp, "p = this.doSomething(b)");
  EXPECT_TRUE(lp.lives(second).count(b));
}

TEST(Liveness, ReturnUsesItsVariable) {
  auto lp = corpus::load_corpus("minimal");
  Label ret = find_label(lp, "return a");
  EXPECT_TRUE(lp.lives(ret).count(*lp.symbol("a")));
}

TEST(Liveness, HandlerOnlyUseIsLiveInsideTry) {
  auto lp = load_program(with_main(
      "class A extends Object { A() { super(); } }\nclass E extends Object { E() { super(); } }",
      "A x; A y; E e; Object r; "
      "try { x = new A(); e = new E(); throw e; } catch (E c) { r = x; } return r;"));
  Label newE = find_label(lp, "e = new E()");
  EXPECT_TRUE(lp.lives(newE).count(*lp.symbol("x")));
  Label newA = find_label(lp, "x = new A()");
  EXPECT_FALSE(lp.lives(newA).count(*lp.symbol("e")));
}
