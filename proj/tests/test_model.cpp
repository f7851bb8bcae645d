#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "c2data/model.hpp"

using namespace c2data;

namespace {

Structure two_mutual_f() {
  Structure A;
  A.n = 2;
  A.binary["f"] = {0, 1, 1, 0};  // f(0,1), f(1,0)
  return A;
}

// Reference evaluator: computes, bottom-up, the set of satisfying assignments
// of each subformula as an extension table over (x,y) value pairs (-1 = any).
// Deliberately a different algorithm from evaluate().
bool ref_eval(const Structure& A, const FormulaPtr& f, int xv, int yv);

long count_sat(const Structure& A, const FormulaPtr& body, const std::string& v,
               int xv, int yv) {
  long c = 0;
  for (int e = 0; e < A.n; ++e) {
    int nx = v == "x" ? e : xv;
    int ny = v == "y" ? e : yv;
    if (ref_eval(A, body, nx, ny)) ++c;
  }
  return c;
}

bool ref_eval(const Structure& A, const FormulaPtr& f, int xv, int yv) {
  auto val = [&](const Term& t) {
    if (!t.is_var) return A.const_map.at(t.name);
    return t.name == "x" ? xv : yv;
  };
  switch (f->kind) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Atom:
      if (f->args.size() == 1) return A.get1(f->pred, val(f->args[0]));
      return A.get2(f->pred, val(f->args[0]), val(f->args[1]));
    case Kind::Equal: return val(f->args[0]) == val(f->args[1]);
    case Kind::Not: return !ref_eval(A, f->kids[0], xv, yv);
    case Kind::And: return ref_eval(A, f->kids[0], xv, yv) && ref_eval(A, f->kids[1], xv, yv);
    case Kind::Or: return ref_eval(A, f->kids[0], xv, yv) || ref_eval(A, f->kids[1], xv, yv);
    case Kind::Implies:
      return !ref_eval(A, f->kids[0], xv, yv) || ref_eval(A, f->kids[1], xv, yv);
    case Kind::Iff:
      return ref_eval(A, f->kids[0], xv, yv) == ref_eval(A, f->kids[1], xv, yv);
    case Kind::Forall:
      return count_sat(A, f->kids[0], f->qvar, xv, yv) == A.n;
    case Kind::Exists:
      return count_sat(A, f->kids[0], f->qvar, xv, yv) >= 1;
    case Kind::Count: {
      long c = count_sat(A, f->kids[0], f->qvar, xv, yv);
      switch (f->ck) {
        case CountKind::Geq: return c >= f->bound;
        case CountKind::Leq: return c <= f->bound;
        case CountKind::Eq: return c == f->bound;
      }
    }
  }
  return false;
}

Structure random_structure(std::mt19937& rng, int n) {
  Structure A;
  A.n = n;
  auto& p = A.unary["p"];
  auto& q = A.unary["q"];
  p.assign(n, 0);
  q.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    p[i] = rng() % 2;
    q[i] = rng() % 2;
  }
  auto& r = A.binary["r"];
  r.assign(n * n, 0);
  for (int i = 0; i < n * n; ++i) r[i] = rng() % 2;
  return A;
}

FormulaPtr random_c2(std::mt19937& rng, int depth, bool x_in, bool y_in);

FormulaPtr random_c2(std::mt19937& rng, int depth, bool x_in, bool y_in) {
  auto vn = [&]() -> std::string {
    if (x_in && y_in) return rng() % 2 ? "x" : "y";
    return x_in ? "x" : "y";
  };
  if (!x_in && !y_in) {
    bool ux = rng() % 2;
    return mk_forall(ux ? "x" : "y", random_c2(rng, depth - 1, ux, !ux));
  }
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 8);
  switch (pick(rng)) {
    case 0: return mk_atom(rng() % 2 ? "p" : "q", {var(vn())});
    case 1: return mk_atom("r", {var(vn()), var(vn())});
    case 2: return mk_equal(var(vn()), var(vn()));
    case 3: return mk_not(random_c2(rng, depth - 1, x_in, y_in));
    case 4:
      return mk_and(random_c2(rng, depth - 1, x_in, y_in),
                    random_c2(rng, depth - 1, x_in, y_in));
    case 5:
      return mk_or(random_c2(rng, depth - 1, x_in, y_in),
                   random_c2(rng, depth - 1, x_in, y_in));
    case 6: {
      bool ux = rng() % 2;
      return mk_forall(ux ? "x" : "y", random_c2(rng, depth - 1, x_in || ux, y_in || !ux));
    }
    case 7: {
      bool ux = rng() % 2;
      return mk_exists(ux ? "x" : "y", random_c2(rng, depth - 1, x_in || ux, y_in || !ux));
    }
    default: {
      bool ux = rng() % 2;
      int k = (int)(rng() % 3);
      CountKind ck = k == 0 ? CountKind::Geq : k == 1 ? CountKind::Leq : CountKind::Eq;
      return mk_count(ck, (long)(rng() % 4), ux ? "x" : "y",
                      random_c2(rng, depth - 1, x_in || ux, y_in || !ux));
    }
  }
}

}  // namespace

TEST_CASE("evaluate: counting semantics on the two-element mutual link") {
  Structure A = two_mutual_f();
  auto f = parse_sentence("forall x. exists=1 y. (f(x,y) & !(x = y))");
  CHECK(evaluate(A, f));
  auto g = parse_sentence("exists>=3 y. f(x,y)");
  CHECK(!evaluate(A, g, {{"x", 0}}));
  CHECK(!evaluate(A, g, {{"x", 1}}));
}

TEST_CASE("evaluate: diagonal matters in the alpha clause") {
  Structure A;
  A.n = 2;
  A.unary["p"] = {1, 0};
  auto f = parse_sentence("forall x. forall y. (p(x) | x = y)");
  CHECK(!evaluate(A, f));  // direct expansion over the 4 pairs
}

TEST_CASE("satisfies_dataset") {
  Structure A;
  A.n = 2;
  A.unary["p"] = {1, 0};
  A.binary["r"] = {0, 1, 0, 0};
  A.const_map = {{"c", 0}, {"d", 1}};
  CHECK(satisfies_dataset(A, parse_data("p(c)")));
  CHECK(!satisfies_dataset(A, parse_data("c != d")) == false);
  Structure B = A;
  B.const_map = {{"c", 0}, {"d", 0}};
  CHECK(!satisfies_dataset(B, parse_data("c != d")));
  CHECK(!satisfies_dataset(A, parse_data("!r(c,d)")));
}

TEST_CASE("evaluate_query") {
  Structure A;
  A.n = 2;
  A.unary["p"] = {0, 1};
  A.binary["r"] = {0, 1, 0, 0};
  auto q = parse_query("answer() :- r(x1,x2), p(x2)");
  CHECK(evaluate_query(A, q, {}));
  auto q2 = parse_query("answer() :- r(x1,x2), p(x1)");
  CHECK(!evaluate_query(A, q2, {}));
  // chain of length 3 on a 2-cycle
  Structure C;
  C.n = 2;
  C.binary["r"] = {0, 1, 1, 0};
  auto q3 = parse_query("answer() :- r(x1,x2), r(x2,x3), r(x3,x4)");
  CHECK(evaluate_query(C, q3, {}));
}

TEST_CASE("evaluate agrees with the reference evaluator on random pairs") {
  std::mt19937 rng(987654);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    int n = 1 + (int)(rng() % 4);
    Structure A = random_structure(rng, n);
    auto f = random_c2(rng, 2, false, false);
    bool a = evaluate(A, f);
    bool b = ref_eval(A, f, -1, -1);
    CHECK(a == b);
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("find_model basics") {
  // direct contradiction
  auto phi = parse_sentence("forall x. !p(x)");
  auto delta = parse_data("p(c)");
  auto r = find_model({phi}, delta, 1, 3);
  CHECK(std::holds_alternative<NoneWithin>(r));
  CHECK(std::get<NoneWithin>(r).hi == 3);

  // the size-2 mutual link
  auto phi2 = parse_sentence("forall x. exists=1 y. (f(x,y) & !(x = y))");
  auto r2 = find_model({phi2}, Dataset{}, 1, 3);
  REQUIRE(std::holds_alternative<Structure>(r2));
  CHECK(std::get<Structure>(r2).n == 2);

  // two constants forced distinct in a 1-element domain
  auto r3 = find_model({}, parse_data("c != d"), 1, 1);
  CHECK(std::holds_alternative<NoneWithin>(r3));
}

TEST_CASE("find_model is monotone in the size bound") {
  auto phi = parse_sentence("forall x. exists=1 y. (f(x,y) & !(x = y))");
  auto phi2 = parse_sentence("forall x. !f(x,x)");
  auto contradiction = parse_sentence("forall x. (p(x) & !p(x))");
  for (int hi = 1; hi <= 3; ++hi) {
    auto r = find_model({contradiction}, Dataset{}, 1, hi);
    CHECK(std::holds_alternative<NoneWithin>(r));
  }
  (void)phi;
  (void)phi2;
}

TEST_CASE("find_model returns a self-verified model with constants merged") {
  // No unique-name assumption: c and d may share an element.
  auto phi = parse_sentence("forall x. forall y. x = y");
  auto delta = parse_data("p(c)\np(d)");
  auto r = find_model({phi}, delta, 1, 2);
  REQUIRE(std::holds_alternative<Structure>(r));
  const auto& A = std::get<Structure>(r);
  CHECK(A.n == 1);
  CHECK(A.const_map.at("c") == A.const_map.at("d"));
}

TEST_CASE("enumerate_models enumerates distinct models") {
  auto phi = parse_sentence("exists x. p(x)");
  auto ms = enumerate_models({phi}, Dataset{}, 2, 100);
  // over 1 unary predicate on 2 elements: {10, 01, 11} = 3 models
  CHECK(ms.size() == 3);
  for (const auto& A : ms) CHECK(evaluate(A, phi));
}

TEST_CASE("constant placements are canonical") {
  auto ps = constant_placements({"a", "b"}, 3, Dataset{});
  // a=0; b in {0,1}
  REQUIRE(ps.size() == 2);
  CHECK(ps[0].at("a") == 0);
  CHECK(ps[0].at("b") == 0);
  CHECK(ps[1].at("b") == 1);
  auto ps2 = constant_placements({"a", "b"}, 3, parse_data("a != b"));
  CHECK(ps2.size() == 1);
}
