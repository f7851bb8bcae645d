#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "c2data/sat_engine.hpp"

using namespace c2data;

namespace {

Verdict run(const std::string& theory, const std::string& data, bool finite,
            RunConfig cfg = {}) {
  auto phis = parse_theory(theory);
  auto t = scott_c2(mk_and_all(phis));
  auto delta = parse_data(data);
  return decide(t, delta, finite, cfg);
}

}  // namespace

TEST_CASE("contradictory data refutes at the data level") {
  auto v = run("forall x. !p(x)", "p(c)", false);
  CHECK(v.kind == Verdict::Kind::Unsat);
  auto v2 = run("forall x. !p(x)", "p(c)", true);
  CHECK(v2.kind == Verdict::Kind::Unsat);
}

TEST_CASE("one counting pair, empty data: SAT with a frame certificate") {
  auto phis = parse_theory("forall x. exists=1 y. (f(x,y) & !(x = y))");
  auto t = scott_c2(phis[0]);
  Dataset empty;
  auto v = decide(t, empty, true);
  REQUIRE(v.kind == Verdict::Kind::Sat);
  REQUIRE(v.cert.has_value());
  CHECK(!v.cert->small_model_branch);
  CHECK(verify_certificate(*v.cert, t, empty));
  // the solution realizes to the 2-element mutual link
  auto S = SignatureStar::make(t, v.cert->padding_override);
  long total = 0;
  for (auto& w : v.cert->solution) total += (long)w.value();
  CHECK(total == 2);
}

TEST_CASE("small model branch") {
  auto v = run("forall x. p(x)", "p(c)", true);
  REQUIRE(v.kind == Verdict::Kind::Sat);
  CHECK(v.cert->small_model_branch);
}

TEST_CASE("satisfiable data with structure") {
  auto v = run("forall x. forall y. (r(x,y) -> (p(x) & !p(y)))", "r(c,d)", true);
  REQUIRE(v.kind == Verdict::Kind::Sat);
  // and the refutation of the strengthened variant
  auto v2 = run("forall x. forall y. (r(x,y) -> (p(x) & !p(y)))", "r(c,d)\nr(d,c)", true);
  CHECK(v2.kind == Verdict::Kind::Unsat);
  auto v3 = run("forall x. forall y. (r(x,y) -> (p(x) & !p(y)))", "r(c,c)", true);
  CHECK(v3.kind == Verdict::Kind::Unsat);
}

TEST_CASE("counting-dead theory is refuted by the empty pool") {
  auto phis = parse_theory(
      "forall x. exists=1 y. (f(x,y) & !(x = y))\n"
      "forall x. forall y. !f(x,y)");
  auto t = scott_c2(mk_and_all(phis));
  Dataset empty;
  RunConfig cfg;
  cfg.padding_override = 0;
  auto v = decide(t, empty, true, cfg);
  CHECK(v.kind == Verdict::Kind::Unsat);
  auto v2 = decide(t, empty, false, cfg);
  CHECK(v2.kind == Verdict::Kind::Unsat);
}

TEST_CASE("mode coherence on satisfiable instances") {
  std::vector<std::pair<std::string, std::string>> instances = {
      {"forall x. exists=1 y. (f(x,y) & !(x = y))", ""},
      {"forall x. (p(x) -> exists y. (r(x,y) & !p(y)))", "p(c)"},
  };
  for (const auto& [th, da] : instances) {
    auto vf = run(th, da, true);
    auto vi = run(th, da, false);
    if (vf.kind == Verdict::Kind::Sat) CHECK(vi.kind == Verdict::Kind::Sat);
  }
}

TEST_CASE("enumerate_dplus basics") {
  auto t = scott_c2(parse_sentence("forall x. forall y. (p(x) | x = y)"));
  {
    // delta = p(c): candidates are 1-element structures with p(c) forced
    auto ds = parse_data("p(c)");
    auto list = enumerate_dplus(ds, t, 1000);
    CHECK(!list.empty());
    for (const auto& dp : list) {
      CHECK(dp.n == 1);
      CHECK(satisfies_dataset(dp, ds));
    }
  }
  {
    // two forced-distinct constants: no single-element candidate
    auto ds = parse_data("c != d");
    auto list = enumerate_dplus(ds, t, 1000);
    for (const auto& dp : list) CHECK(dp.n == 2);
    CHECK(!list.empty());
  }
  {
    // alpha refutes every candidate
    auto t2 = scott_c2(parse_sentence("forall x. forall y. (!r(x,y) | x = y)"));
    auto ds = parse_data("r(c,d)\nc != d");
    auto list = enumerate_dplus(ds, t2, 1000);
    CHECK(list.empty());
  }
}

TEST_CASE("certificate mutation is detected") {
  auto phis = parse_theory("forall x. exists=1 y. (f(x,y) & !(x = y))");
  auto t = scott_c2(phis[0]);
  Dataset empty;
  auto v = decide(t, empty, true);
  REQUIRE(v.kind == Verdict::Kind::Sat);
  auto cert = *v.cert;
  REQUIRE(verify_certificate(cert, t, empty));

  // decrement one solution entry
  {
    auto m = cert;
    REQUIRE(!m.solution.empty());
    if (m.solution[0].value() > 0) {
      m.solution[0] = ExtNat(m.solution[0].value() - 1);
      CHECK(!verify_certificate(m, t, empty));
    }
  }
  // drop a frame star
  {
    auto m = cert;
    if (m.frame.stars.size() > (size_t)m.frame.n_observable) {
      m.frame.stars.pop_back();
      m.solution.pop_back();
      CHECK(!verify_certificate(m, t, empty));
    }
  }
}

TEST_CASE("data with constants: SAT instance produces a splice-checked certificate") {
  auto v = run("forall x. (p(x) -> exists y. (r(x,y) & q(y)))", "p(c)\np(d)\nc != d", true);
  REQUIRE(v.kind == Verdict::Kind::Sat);
  CHECK(v.cert.has_value());
}

TEST_CASE("determinism: identical runs give identical certificates") {
  auto phis = parse_theory("forall x. exists=1 y. (f(x,y) & !(x = y))");
  auto t = scott_c2(phis[0]);
  Dataset empty;
  auto v1 = decide(t, empty, true);
  auto v2 = decide(t, empty, true);
  REQUIRE(v1.kind == Verdict::Kind::Sat);
  REQUIRE(v2.kind == Verdict::Kind::Sat);
  CHECK(v1.cert->small_model_branch == v2.cert->small_model_branch);
  CHECK(v1.cert->solution.size() == v2.cert->solution.size());
  for (size_t i = 0; i < v1.cert->solution.size(); ++i)
    CHECK(v1.cert->solution[i] == v2.cert->solution[i]);
  CHECK(v1.cert->frame.stars == v2.cert->frame.stars);
}
