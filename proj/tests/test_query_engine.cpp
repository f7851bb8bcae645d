#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "c2data/query_engine.hpp"

using namespace c2data;

namespace {

AnswerResult ask(const std::string& theory, const std::string& data,
                 const std::string& query, const std::vector<std::string>& tuple,
                 bool finite) {
  auto phi = mk_and_all(parse_theory(theory.empty() ? "true" : theory));
  auto q = parse_query(query);
  auto d = parse_data(data);
  return answer(phi, q, d, tuple, finite);
}

}  // namespace

TEST_CASE("substitution census") {
  auto q = parse_query("answer() :- p(x1)");
  auto inst = negate_and_instantiate(q, {}, {"c"});
  // x1 -> {x1, c}: exactly 2 substitutions
  CHECK(inst.kept.size() + inst.dropped.size() == 2);
}

TEST_CASE("conjunction-over-assignments equivalence on random structures") {
  // forall x theta over K={c}: theta == r(x,c); the split must agree with the
  // unsplit universal on random structures
  std::mt19937 rng(31415);
  auto q = parse_query("answer(y1) :- r(x1,y1)");
  int agreements = 0;
  for (int iter = 0; iter < 100; ++iter) {
    int n = 1 + (int)(rng() % 3);
    Structure A;
    A.n = n;
    auto& r = A.binary["r"];
    r.assign(n * n, 0);
    for (int i = 0; i < n * n; ++i) r[i] = rng() % 2;
    A.const_map["c"] = (int)(rng() % n);

    // forall x1 !r(x1, c)  ==  !r(c,c) & forall x1 (x1 != c -> !r(x1,c))
    bool direct = true;
    for (int e = 0; e < n; ++e)
      if (A.get2("r", e, A.const_map["c"])) direct = false;

    auto inst = negate_and_instantiate(q, {"c"}, {"c"});  // y1 is the head
    bool split = true;
    for (const auto& cl : inst.kept) {
      // evaluate the universal clause on A
      std::function<bool(size_t, Assignment&)> all = [&](size_t i,
                                                         Assignment& th) -> bool {
        if (i == cl.vars.size()) {
          for (const auto& l : cl.lits) {
            std::vector<int> vals;
            for (const auto& a : l.args)
              vals.push_back(a.is_var ? th.at(a.name) : A.const_map.at(a.name));
            bool v = vals.size() == 1 ? A.get1(l.pred, vals[0])
                                      : A.get2(l.pred, vals[0], vals[1]);
            if (!v) return true;  // some literal of the clause holds
          }
          return false;
        }
        for (int e = 0; e < n; ++e) {
          th[cl.vars[i]] = e;
          if (!all(i + 1, th)) return false;
        }
        return true;
      };
      Assignment th;
      if (!all(0, th)) split = false;
    }
    // dropped clauses are v-acyclic here (no v-cycles possible with one atom)
    CHECK(inst.dropped.empty());
    CHECK(direct == split);
    ++agreements;
  }
  CHECK(agreements == 100);
}

TEST_CASE("v-cyclicity") {
  // the grid query clause: 4-cycle of variables
  UniversalClause grid;
  grid.vars = {"x1", "x2", "x3", "x4"};
  grid.lits = {
      {"h", {var("x1"), var("x2")}},
      {"v", {var("x1"), var("x3")}},
      {"v", {var("x2"), var("x4")}},
      {"hbar", {var("x3"), var("x4")}},
  };
  CHECK(is_v_cyclic(grid));

  UniversalClause path;
  path.vars = {"x1", "x2", "x3"};
  path.lits = {{"r", {var("x1"), var("x2")}}, {"r", {var("x2"), var("x3")}}};
  CHECK(!is_v_cyclic(path));

  // triangle through the constants edge: c-x, d-x, plus c-d implicit
  UniversalClause tri;
  tri.vars = {"x"};
  tri.lits = {{"r", {cst("c"), var("x")}}, {"s", {cst("d"), var("x")}}};
  CHECK(is_v_cyclic(tri));
}

TEST_CASE("clause_choices") {
  auto d = parse_data("p(c)\n!q(c)");
  // !p(x) | !q(y): two components
  {
    UniversalClause c;
    c.vars = {"x", "y"};
    c.lits = {{"p", {var("x")}}, {"q", {var("y")}}};
    auto ch = clause_choices(c, d);
    CHECK(!ch.discharged);
    CHECK(ch.options.size() == 2);
  }
  // ground literal !q(c) holds in the data: discharged
  {
    UniversalClause c;
    c.vars = {};
    c.lits = {{"q", {cst("c")}}};
    auto ch = clause_choices(c, d);
    CHECK(ch.discharged);
  }
  // ground literal !p(c) refuted: dropped; nothing remains
  {
    UniversalClause c;
    c.vars = {};
    c.lits = {{"p", {cst("c")}}};
    auto ch = clause_choices(c, d);
    CHECK(!ch.discharged);
    CHECK(ch.options.empty());
  }
  // single unsplittable residue
  {
    UniversalClause c;
    c.vars = {"x", "y"};
    c.lits = {{"r", {var("x"), var("y")}}};
    auto ch = clause_choices(c, d);
    REQUIRE(ch.options.size() == 1);
    CHECK(std::holds_alternative<Component>(ch.options[0]));
  }
}

TEST_CASE("eliminate_constant keys by shape") {
  FreshPredTable table;
  UniversalClause c1;
  c1.vars = {"u"};
  c1.lits = {{"r", {cst("c"), var("u")}}, {"p", {var("u")}}};
  UniversalClause c2;
  c2.vars = {"u"};
  c2.lits = {{"r", {cst("d"), var("u")}}, {"p", {var("u")}}};
  auto e1 = eliminate_constant(c1, table);
  auto e2 = eliminate_constant(c2, table);
  REQUIRE(e1.fact.has_value());
  REQUIRE(e2.fact.has_value());
  CHECK(e1.fact->atom.pred == e2.fact->atom.pred);  // same shape, same predicate
  CHECK(e1.fact->atom.consts[0] == "c");
  CHECK(e2.fact->atom.consts[0] == "d");
  // zero-constant clause: unchanged, no fact
  UniversalClause c3;
  c3.vars = {"u", "v"};
  c3.lits = {{"r", {var("u"), var("v")}}};
  auto e3 = eliminate_constant(c3, table);
  CHECK(!e3.fact.has_value());
  CHECK(e3.clause.lits.size() == 1);
}

TEST_CASE("tree_rollup: depth-1 and equivalence on random structures") {
  // forall x1 (!r(x,x1) | !p(x1)) rooted at x
  UniversalClause c;
  c.vars = {"x", "x1"};
  c.lits = {{"r", {var("x"), var("x1")}}, {"p", {var("x1")}}};
  auto rolled = tree_rollup(c, "x");
  auto fv = free_vars(rolled);
  REQUIRE(fv.size() == 1);
  CHECK(*fv.begin() == "x");
  // guarded shape
  auto closed = mk_forall("x", rolled);
  CHECK(check_fragment(closed, Fragment::GC2) == std::nullopt);

  // two-level chain: forall x1 x2 (!r(x,x1) | !s(x1,x2) | !q(x2))
  UniversalClause c2;
  c2.vars = {"x", "x1", "x2"};
  c2.lits = {{"r", {var("x"), var("x1")}},
             {"s", {var("x1"), var("x2")}},
             {"q", {var("x2")}}};
  auto rolled2 = tree_rollup(c2, "x");
  CHECK(check_fragment(mk_forall("x", rolled2), Fragment::GC2) == std::nullopt);

  // equivalence with the direct universal on random structures
  std::mt19937 rng(777);
  for (int iter = 0; iter < 60; ++iter) {
    int n = 1 + (int)(rng() % 3);
    Structure A;
    A.n = n;
    for (auto p : {"p", "q"}) {
      auto& t = A.unary[p];
      t.assign(n, 0);
      for (int i = 0; i < n; ++i) t[i] = rng() % 2;
    }
    for (auto r : {"r", "s"}) {
      auto& t = A.binary[r];
      t.assign(n * n, 0);
      for (int i = 0; i < n * n; ++i) t[i] = rng() % 2;
    }
    for (int e = 0; e < n; ++e) {
      // direct evaluation of forall x1 x2 (clause)
      bool direct = true;
      for (int a1 = 0; a1 < n; ++a1)
        for (int a2 = 0; a2 < n; ++a2) {
          bool any = !A.get2("r", e, a1) || !A.get2("s", a1, a2) || !A.get1("q", a2);
          if (!any) direct = false;
        }
      bool via = evaluate(A, rolled2, {{"x", e}});
      CHECK(direct == via);
    }
  }
}

TEST_CASE("star-shaped rollup") {
  UniversalClause c;
  c.vars = {"x", "a", "b", "d"};
  c.lits = {{"r", {var("x"), var("a")}},
            {"s", {var("x"), var("b")}},
            {"t", {var("d"), var("x")}}};
  auto rolled = tree_rollup(c, "x");
  // three guarded universals in a disjunction
  CHECK(check_fragment(mk_forall("x", rolled), Fragment::GC2) == std::nullopt);
  std::mt19937 rng(99);
  for (int iter = 0; iter < 40; ++iter) {
    int n = 1 + (int)(rng() % 3);
    Structure A;
    A.n = n;
    for (auto r : {"r", "s", "t"}) {
      auto& t = A.binary[r];
      t.assign(n * n, 0);
      for (int i = 0; i < n * n; ++i) t[i] = rng() % 2;
    }
    for (int e = 0; e < n; ++e) {
      bool direct = true;
      for (int a = 0; a < n && direct; ++a)
        for (int b = 0; b < n && direct; ++b)
          for (int d = 0; d < n && direct; ++d)
            if (A.get2("r", e, a) && A.get2("s", e, b) && A.get2("t", d, e))
              direct = false;
      CHECK(direct == evaluate(A, rolled, {{"x", e}}));
    }
  }
}

TEST_CASE("answer: trivial positive and negative cases") {
  // Delta = {p(c)}, phi = true, psi = exists x p(x): entailed
  auto r1 = ask("", "p(c)", "answer() :- p(x1)", {}, true);
  CHECK(r1.kind == AnswerKind::Entailed);

  // psi = exists x q(x): a countermodel lacks q
  auto r2 = ask("", "p(c)", "answer() :- q(x1)", {}, true);
  CHECK(r2.kind == AnswerKind::NotEntailed);
  REQUIRE(r2.evidence.has_value());
  if (r2.evidence->countermodel) {
    auto q = parse_query("answer() :- q(x1)");
    CHECK(!evaluate_query(*r2.evidence->countermodel, q, {}));
  }
}

TEST_CASE("answer: guarded theory forces the query") {
  // every p-element has an r-successor in q; data p(c); query exists x,y r(x,y) & q(y)
  auto r = ask("forall x. (p(x) -> exists y. (r(x,y) & q(y)))", "p(c)",
               "answer() :- r(x1,x2), q(x2)", {}, true);
  CHECK(r.kind == AnswerKind::Entailed);
  // without the theory the query is open
  auto r2 = ask("", "p(c)", "answer() :- r(x1,x2), q(x2)", {}, true);
  CHECK(r2.kind == AnswerKind::NotEntailed);
}

TEST_CASE("answer: head variables and tuples") {
  auto r = ask("", "r(c,d)\nq(d)", "answer(y1) :- r(y1,x1), q(x1)", {"c"}, true);
  CHECK(r.kind == AnswerKind::Entailed);
  auto r2 = ask("", "r(c,d)", "answer(y1) :- r(y1,x1), q(x1)", {"c"}, true);
  CHECK(r2.kind == AnswerKind::NotEntailed);
  // asking about the wrong constant
  auto r3 = ask("", "r(c,d)\nq(d)", "answer(y1) :- r(y1,x1), q(x1)", {"d"}, true);
  CHECK(r3.kind == AnswerKind::NotEntailed);
}

TEST_CASE("answer: entailment via merged constants is blocked by distinctness") {
  // With c and d possibly equal, r(c,c) would follow from r(c,d) in the merged
  // branch only; the all-distinct branch still has a countermodel.
  auto r = ask("", "r(c,d)", "answer() :- r(x1,x1)", {}, true);
  CHECK(r.kind == AnswerKind::NotEntailed);
  // force the merge: now the diagonal atom is in the data
  auto r2 = ask("", "r(c,d)\nc = d", "answer() :- r(x1,x1)", {}, true);
  CHECK(r2.kind == AnswerKind::Entailed);
}

TEST_CASE("answer: monotonicity entail => finEntail on small instances") {
  std::vector<std::tuple<std::string, std::string, std::string>> instances = {
      {"", "p(c)", "answer() :- p(x1)"},
      {"forall x. (p(x) -> exists y. (r(x,y) & q(y)))", "p(c)",
       "answer() :- q(x1)"},
      {"", "r(c,d)", "answer() :- r(x1,x2)"},
  };
  for (const auto& [th, da, qy] : instances) {
    auto inf = ask(th, da, qy, {}, false);
    auto fin = ask(th, da, qy, {}, true);
    if (inf.kind == AnswerKind::Entailed) CHECK(fin.kind == AnswerKind::Entailed);
  }
}

TEST_CASE("answer: trace is populated") {
  auto r = ask("", "p(c)", "answer() :- q(x1)", {}, true);
  CHECK(r.trace.partitions >= 1);
  CHECK(r.trace.xi_total >= 2);
  CHECK(r.trace.branch_verdicts.size() >= 1);
}
