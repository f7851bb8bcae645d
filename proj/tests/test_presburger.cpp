#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "c2data/presburger.hpp"

using namespace c2data;

namespace {

const ExtNat INF = ExtNat::infinity();

LinearAtom atom(LinearExpr l, Rel r, LinearExpr rr) { return LinearAtom{l, rr, r}; }

// Compiled brute force over assignments with values <= bound: the positive
// tree is flattened once and evaluated over a plain value vector.
struct BruteSystem {
  struct CAtom {
    std::vector<std::pair<int, long>> terms;  // (var index, coefficient)
    long cst;
    Rel rel;
  };
  struct CNode {
    int type;  // 0 atom, 1 and, 2 or
    int atom = -1;
    std::vector<int> kids;
  };
  std::vector<std::string> vars;
  std::vector<CAtom> atoms;
  std::vector<CNode> nodes;
  int root = -1;
  std::vector<std::pair<int, long>> pins;

  explicit BruteSystem(const ConstraintSystem& sys) {
    vars = sys.variables();
    std::map<std::string, int> id;
    for (size_t i = 0; i < vars.size(); ++i) id[vars[i]] = (int)i;
    root = compile(sys.root, id);
    for (const auto& [v, c] : sys.pinned) pins.push_back({id.at(v), c});
  }

  int compile(const CSPtr& n, const std::map<std::string, int>& id) {
    CNode out;
    if (!n) {
      out.type = 1;
      nodes.push_back(out);
      return (int)nodes.size() - 1;
    }
    if (n->type == CSNode::Atom) {
      CAtom ca;
      for (const auto& [v, c] : n->atom.lhs.coef) ca.terms.push_back({id.at(v), c});
      for (const auto& [v, c] : n->atom.rhs.coef) ca.terms.push_back({id.at(v), -c});
      ca.cst = n->atom.lhs.cst - n->atom.rhs.cst;
      ca.rel = n->atom.rel;
      atoms.push_back(ca);
      out.type = 0;
      out.atom = (int)atoms.size() - 1;
      nodes.push_back(out);
      return (int)nodes.size() - 1;
    }
    out.type = n->type == CSNode::And ? 1 : 2;
    std::vector<int> kids;
    for (const auto& k : n->kids) kids.push_back(compile(k, id));
    nodes[nodes.size()];  // no-op
    out.kids = kids;
    nodes.push_back(out);
    return (int)nodes.size() - 1;
  }

  bool eval_node(int ni, const std::vector<long>& w) const {
    const CNode& nd = nodes[ni];
    if (nd.type == 0) {
      const CAtom& a = atoms[nd.atom];
      long long s = a.cst;
      for (const auto& [v, c] : a.terms) s += (long long)c * w[v];
      switch (a.rel) {
        case Rel::Eq: return s == 0;
        case Rel::Le: return s <= 0;
        case Rel::Lt: return s < 0;
        case Rel::Ge: return s >= 0;
        case Rel::Gt: return s > 0;
      }
      return false;
    }
    if (nd.type == 1) {
      for (int k : nd.kids)
        if (!eval_node(k, w)) return false;
      return true;
    }
    for (int k : nd.kids)
      if (eval_node(k, w)) return true;
    return false;
  }

  bool feasible_upto(long bound) const {
    std::vector<long> w(vars.size(), 0);
    std::vector<char> pinned(vars.size(), 0);
    for (const auto& [v, c] : pins) {
      w[v] = c;
      pinned[v] = 1;
    }
    std::function<bool(size_t)> go = [&](size_t i) -> bool {
      if (i == vars.size()) return eval_node(root, w);
      if (pinned[i]) return go(i + 1);
      for (long v = 0; v <= bound; ++v) {
        w[i] = v;
        if (go(i + 1)) return true;
      }
      return false;
    };
    return go(0);
  }
};

bool brute_feasible(const ConstraintSystem& sys, long bound) {
  return BruteSystem(sys).feasible_upto(bound);
}

}  // namespace

TEST_CASE("extended-natural identities") {
  CHECK(ExtNat(5) + INF == INF);
  CHECK(INF + ExtNat(5) == INF);
  CHECK(INF + INF == INF);
  CHECK(INF * INF == INF);
  CHECK(ExtNat(0) * INF == ExtNat(0));
  CHECK(INF * ExtNat(0) == ExtNat(0));
  CHECK(ExtNat(3) * INF == INF);
  CHECK(INF * ExtNat(3) == INF);
  CHECK(INF > ExtNat(1000000));
  CHECK(!(INF > INF));
  CHECK(INF == INF);

  std::vector<ExtNat> dom = {ExtNat(0), ExtNat(1), ExtNat(2), ExtNat(7), INF};
  for (auto a : dom)
    for (auto b : dom) {
      CHECK(a + b == b + a);
      CHECK(a * b == b * a);
      for (auto c : dom) {
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
      }
      // total order
      CHECK(((a < b) || (b < a) || (a == b)));
    }
}

TEST_CASE("eval_extnat examples") {
  ExtAssignment a{{"w", INF}};
  LinearExpr e;
  e.add("w", 1);
  e.cst = 5;
  CHECK(eval_extnat(e, a) == INF);

  LinearExpr z;
  z.add("w", 0);
  CHECK(eval_extnat(z, a) == ExtNat(0));

  // w+1 <= w at infinity is true, at 3 false
  LinearAtom at = atom(LinearExpr::variable("w"), Rel::Le, LinearExpr::variable("w"));
  at.lhs.cst = 1;
  CHECK(eval_extnat(at, a));
  ExtAssignment b{{"w", ExtNat(3)}};
  CHECK(!eval_extnat(at, b));
}

TEST_CASE("feasible: basic examples") {
  // w1+w2 = 3 and w1 >= 2
  {
    LinearExpr sum;
    sum.add("w1", 1).add("w2", 1);
    ConstraintSystem sys;
    sys.root = cs_and({cs_atom(atom(sum, Rel::Eq, LinearExpr(3))),
                       cs_atom(atom(LinearExpr::variable("w1"), Rel::Ge, LinearExpr(2)))});
    auto r = feasible(sys, FeasMode::Nat);
    REQUIRE(std::holds_alternative<Witness>(r));
    auto w = std::get<Witness>(r).values;
    CHECK(check_witness(sys, w, FeasMode::Nat));
    // brute-force confirms the expected witness exists
    REQUIRE(brute_feasible(sys, 10));
  }
  // 2w = 1: parity infeasible
  {
    LinearExpr two;
    two.add("w", 2);
    ConstraintSystem sys;
    sys.root = cs_atom(atom(two, Rel::Eq, LinearExpr(1)));
    CHECK(std::holds_alternative<Infeasible>(feasible(sys, FeasMode::Nat)));
  }
  // w+1 <= w separates Nat from ExtNat
  {
    LinearAtom at = atom(LinearExpr::variable("w"), Rel::Le, LinearExpr::variable("w"));
    at.lhs.cst = 1;
    ConstraintSystem sys;
    sys.root = cs_atom(at);
    CHECK(std::holds_alternative<Infeasible>(feasible(sys, FeasMode::Nat)));
    auto r = feasible(sys, FeasMode::ExtNat);
    REQUIRE(std::holds_alternative<Witness>(r));
    CHECK(std::get<Witness>(r).values.at("w").is_inf());
  }
}

TEST_CASE("feasible: pins and disjunctions") {
  ConstraintSystem sys;
  // (w1 <= 1 or w1 > 4) and w1 + w2 >= 3, pinned w2 = 1
  LinearExpr s;
  s.add("w1", 1).add("w2", 1);
  sys.root = cs_and({cs_or({cs_atom(atom(LinearExpr::variable("w1"), Rel::Le, LinearExpr(1))),
                            cs_atom(atom(LinearExpr::variable("w1"), Rel::Gt, LinearExpr(4)))}),
                     cs_atom(atom(s, Rel::Ge, LinearExpr(3)))});
  sys.pinned = {{"w2", 1}};
  auto r = feasible(sys, FeasMode::Nat);
  REQUIRE(std::holds_alternative<Witness>(r));
  auto w = std::get<Witness>(r).values;
  CHECK(check_witness(sys, w, FeasMode::Nat));
  CHECK(w.at("w2") == ExtNat(1));
}

TEST_CASE("differential: feasible(Nat) vs brute force on random systems") {
  std::mt19937 rng(555111);
  int agreements = 0;
  for (int iter = 0; iter < 200; ++iter) {
    int nv = 1 + (int)(rng() % 4);
    std::vector<std::string> vars;
    for (int i = 0; i < nv; ++i) vars.push_back("w" + std::to_string(i));
    int natoms = 1 + (int)(rng() % 5);
    std::vector<CSPtr> ors;
    for (int i = 0; i < natoms; ++i) {
      LinearExpr l, r;
      for (int v = 0; v < nv; ++v) {
        long cl = (long)(rng() % 7) - 3;
        long cr = (long)(rng() % 7) - 3;
        if (cl) l.add(vars[v], cl);
        if (cr) r.add(vars[v], cr);
      }
      l.cst = (long)(rng() % 21) - 10;
      r.cst = (long)(rng() % 21) - 10;
      Rel rel = std::vector<Rel>{Rel::Eq, Rel::Le, Rel::Ge, Rel::Lt, Rel::Gt}[rng() % 5];
      ors.push_back(cs_atom(atom(l, rel, r)));
    }
    ConstraintSystem sys;
    // random and/or structure: pair some atoms into disjunctions
    std::vector<CSPtr> tops;
    for (size_t i = 0; i < ors.size(); i += 2) {
      if (i + 1 < ors.size() && rng() % 2)
        tops.push_back(cs_or({ors[i], ors[i + 1]}));
      else {
        tops.push_back(ors[i]);
        if (i + 1 < ors.size()) tops.push_back(ors[i + 1]);
      }
    }
    sys.root = cs_and(tops);

    bool brute = brute_feasible(sys, 50);
    auto r = feasible(sys, FeasMode::Nat);
    bool exact = std::holds_alternative<Witness>(r);
    if (exact) {
      const auto& w = std::get<Witness>(r).values;
      CHECK(check_witness(sys, w, FeasMode::Nat));
      bool small = true;
      for (const auto& [v, val] : w)
        if (val > ExtNat(50)) small = false;
      if (small) {
        // a witness within the brute window must be found by brute force
        CAPTURE(sys.to_sexpr());
        CHECK(brute);
      }
    } else {
      // brute force can never beat an exact Infeasible
      CAPTURE(sys.to_sexpr());
      CHECK(!brute);
    }
    ++agreements;
  }
  CHECK(agreements == 200);
}

TEST_CASE("ExtNat feasibility is monotone w.r.t. Nat") {
  std::mt19937 rng(424242);
  for (int iter = 0; iter < 100; ++iter) {
    int nv = 1 + (int)(rng() % 3);
    std::vector<CSPtr> atoms;
    for (int i = 0; i < 3; ++i) {
      LinearExpr l, r;
      for (int v = 0; v < nv; ++v) {
        unsigned long cl = rng() % 3;
        unsigned long cr = rng() % 3;
        if (cl) l.add("w" + std::to_string(v), (long)cl);
        if (cr) r.add("w" + std::to_string(v), (long)cr);
      }
      l.cst = (long)(rng() % 6);
      r.cst = (long)(rng() % 6);
      Rel rel = std::vector<Rel>{Rel::Eq, Rel::Le, Rel::Ge}[rng() % 3];
      atoms.push_back(cs_atom(atom(l, rel, r)));
    }
    ConstraintSystem sys;
    sys.root = cs_and(atoms);
    bool nat = std::holds_alternative<Witness>(feasible(sys, FeasMode::Nat));
    bool ext = std::holds_alternative<Witness>(feasible(sys, FeasMode::ExtNat));
    if (nat) CHECK(ext);
  }
}

TEST_CASE("sexpr dump") {
  ConstraintSystem sys;
  sys.root = cs_or({cs_atom(atom(LinearExpr::variable("u"), Rel::Le, LinearExpr(1))),
                    cs_atom(atom(LinearExpr::variable("u"), Rel::Gt, LinearExpr(4)))});
  auto s = sys.to_sexpr();
  CHECK(s.find("(or") != std::string::npos);
  CHECK(s.find("(u <= 1)") != std::string::npos);
}
