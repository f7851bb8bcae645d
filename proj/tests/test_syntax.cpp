#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "c2data/syntax.hpp"

using namespace c2data;

TEST_CASE("parse basic theory sentences") {
  auto f = parse_sentence("forall x. !p(x)");
  CHECK(f->kind == Kind::Forall);
  CHECK(f->qvar == "x");
  CHECK(f->kids[0]->kind == Kind::Not);
  CHECK(f->kids[0]->kids[0]->pred == "p");

  auto g = parse_sentence("exists>=41 y. (supervises(x,y) & grad_student(y))");
  CHECK(g->kind == Kind::Count);
  CHECK(g->ck == CountKind::Geq);
  CHECK(g->bound == 41);
  CHECK(g->qvar == "y");
  CHECK(g->kids[0]->kind == Kind::And);
}

TEST_CASE("parse error carries position") {
  try {
    parse_sentence("p(x");
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.col == 4);
    CHECK(!e.expected.empty());
  }
}

TEST_CASE("quantifier scope extends to the end") {
  auto f = parse_sentence("forall x. p(x) & q(x)");
  CHECK(f->kind == Kind::Forall);
  CHECK(f->kids[0]->kind == Kind::And);

  auto g = parse_sentence("p(x) & (forall y. q(y))");
  CHECK(g->kind == Kind::And);
}

TEST_CASE("precedence and associativity") {
  auto f = parse_sentence("p(x) -> q(x) -> r(x,x)");
  CHECK(f->kind == Kind::Implies);
  CHECK(f->kids[1]->kind == Kind::Implies);  // right-assoc

  auto g = parse_sentence("!p(x) & q(x) | r(x,x)");
  CHECK(g->kind == Kind::Or);
  CHECK(g->kids[0]->kind == Kind::And);
  CHECK(g->kids[0]->kids[0]->kind == Kind::Not);

  auto h = parse_sentence("x != y");
  CHECK(h->kind == Kind::Not);
  CHECK(h->kids[0]->kind == Kind::Equal);
}

TEST_CASE("parse data files") {
  auto ds = parse_data("c(a1)\nl1(a1,b11)");
  CHECK(ds.literals.size() == 2);
  auto ds2 = parse_data("!t(b1)");
  CHECK(ds2.literals.begin()->positive == false);
  auto ds3 = parse_data("a != b");
  CHECK(ds3.eqs.size() == 1);
  CHECK(!ds3.eqs.begin()->equal);

  CHECK_THROWS_AS(parse_data("p(c)\n!p(c)"), ContradictionError);
  auto dup = parse_data("p(c)\np(c)");
  CHECK(dup.literals.size() == 1);
}

TEST_CASE("parse queries") {
  auto q = parse_query("answer() :- h(x1,x2), v(x1,x3), v(x2,x4), hbar(x3,x4), p(x5)");
  CHECK(q.head_vars.empty());
  CHECK(q.exist_vars.size() == 5);
  CHECK(q.atoms.size() == 5);

  auto q2 = parse_query("answer(y1) :- r(y1,x1), p(x1)");
  CHECK(q2.head_vars == std::vector<std::string>{"y1"});
  CHECK(q2.exist_vars == std::vector<std::string>{"x1"});

  CHECK_THROWS_AS(parse_query("answer() :- x1 = x2"), EqualityInQuery);
  CHECK_THROWS_AS(parse_query("answer() :- p(\"c\")"), ConstantInQuery);
}

TEST_CASE("fragment checks: examples") {
  // sentence (1)-style: unguarded counting
  auto s1 = parse_sentence(
      "exists<=1 x. (professor(x) & exists>=4 y. (supervises(x,y) & grad_student(y)))");
  CHECK(check_fragment(s1, Fragment::C2) == std::nullopt);
  auto v1 = check_fragment(s1, Fragment::GC2);
  REQUIRE(v1.has_value());
  const Formula* node = resolve_path(s1, v1->path);
  REQUIRE(node != nullptr);
  CHECK(node->kind == Kind::Count);

  // unguarded forall-forall biconditional
  auto s2 = parse_sentence("forall x. forall y. (hbar(x,y) <-> !h(x,y))");
  CHECK(check_fragment(s2, Fragment::C2) == std::nullopt);
  CHECK(check_fragment(s2, Fragment::GC2).has_value());

  // "no professor supervises more than forty grads"
  auto s3 = parse_sentence(
      "!(exists x. (professor(x) & exists>=41 y. (supervises(x,y) & grad_student(y))))");
  CHECK(check_fragment(s3, Fragment::GC2) == std::nullopt);
}

TEST_CASE("fragment inclusion chain") {
  std::vector<std::string> g2minus_ok = {
      "forall x. (c(x) -> exists y. (l1(x,y) & t(y)))",
      "forall x. forall y. (o(x,y) -> (t(x) <-> !t(y)))",
      "exists x. r(x,y)",
      "forall x. !p(x)",
  };
  for (const auto& s : g2minus_ok) {
    auto f = parse_sentence(s);
    if (check_fragment(f, Fragment::G2minus) == std::nullopt) {
      CHECK(check_fragment(f, Fragment::GC2) == std::nullopt);
      CHECK(check_fragment(f, Fragment::C2) == std::nullopt);
    }
    if (check_fragment(f, Fragment::GC2) == std::nullopt)
      CHECK(check_fragment(f, Fragment::C2) == std::nullopt);
  }
  // equality / counting rejected in the minus fragments
  auto e = parse_sentence("forall x. forall y. (r(x,y) -> x = y)");
  CHECK(check_fragment(e, Fragment::L2minus).has_value());
  CHECK(check_fragment(e, Fragment::C2) == std::nullopt);
  auto c = parse_sentence("forall x. exists=1 y. (f(x,y) & !(x = y))");
  CHECK(check_fragment(c, Fragment::G2minus).has_value());
  CHECK(check_fragment(c, Fragment::GC2) == std::nullopt);
}

TEST_CASE("violation path resolves to a real node") {
  auto f = parse_sentence("forall x. (p(x) & forall y. (hbar(x,y) <-> !h(x,y)))");
  auto v = check_fragment(f, Fragment::GC2);
  REQUIRE(v.has_value());
  CHECK(resolve_path(f, v->path) != nullptr);
}

// ---------------------------------------------------------------------------
// Random AST generator for the render/parse round-trip property
// ---------------------------------------------------------------------------

namespace {

FormulaPtr random_formula(std::mt19937& rng, int depth, bool in_scope_x, bool in_scope_y) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  auto var_name = [&]() -> std::string {
    if (in_scope_x && in_scope_y) return rng() % 2 ? "x" : "y";
    return in_scope_x ? "x" : "y";
  };
  if (!in_scope_x && !in_scope_y) {
    // force a quantifier at the top
    bool use_x = rng() % 2;
    return mk_forall(use_x ? "x" : "y",
                     random_formula(rng, depth - 1, use_x, !use_x ? true : false));
  }
  switch (pick(rng)) {
    case 0: {
      std::string p = rng() % 2 ? "p" : "q";
      return mk_atom(p, {var(var_name())});
    }
    case 1:
      return mk_atom("r", {var(var_name()), var(var_name())});
    case 2:
      return mk_equal(var(var_name()), var(var_name()));
    case 3:
      return mk_not(random_formula(rng, depth - 1, in_scope_x, in_scope_y));
    case 4:
      return mk_and(random_formula(rng, depth - 1, in_scope_x, in_scope_y),
                    random_formula(rng, depth - 1, in_scope_x, in_scope_y));
    case 5:
      return mk_or(random_formula(rng, depth - 1, in_scope_x, in_scope_y),
                   random_formula(rng, depth - 1, in_scope_x, in_scope_y));
    case 6:
      return mk_implies(random_formula(rng, depth - 1, in_scope_x, in_scope_y),
                        random_formula(rng, depth - 1, in_scope_x, in_scope_y));
    case 7:
      return mk_iff(random_formula(rng, depth - 1, in_scope_x, in_scope_y),
                    random_formula(rng, depth - 1, in_scope_x, in_scope_y));
    case 8: {
      bool use_x = rng() % 2;
      return mk_forall(use_x ? "x" : "y",
                       random_formula(rng, depth - 1, in_scope_x || use_x,
                                      in_scope_y || !use_x));
    }
    default: {
      bool use_x = rng() % 2;
      int kind = (int)(rng() % 3);
      CountKind ck = kind == 0 ? CountKind::Geq : kind == 1 ? CountKind::Leq : CountKind::Eq;
      long n = (long)(rng() % 4);
      return mk_count(ck, n, use_x ? "x" : "y",
                      random_formula(rng, depth - 1, in_scope_x || use_x,
                                     in_scope_y || !use_x));
    }
  }
}

}  // namespace

TEST_CASE("render/parse round-trip over generated ASTs") {
  std::mt19937 rng(20240817);
  for (int i = 0; i < 500; ++i) {
    auto f = random_formula(rng, 4, false, false);
    std::string text = render(f);
    FormulaPtr g;
    REQUIRE_NOTHROW(g = parse_sentence(text));
    CHECK(formula_equal(f, g));
    CHECK(render(g) == text);
  }
}

TEST_CASE("theory files with comments") {
  auto fs = parse_theory("# a comment\nforall x. p(x)\n\nforall y. q(y) # tail\n");
  CHECK(fs.size() == 2);
}
