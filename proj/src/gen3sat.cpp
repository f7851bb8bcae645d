#include "c2data/gen3sat.hpp"

#include <array>
#include <map>
#include <set>
#include <sstream>

namespace c2data {

Cnf parse_dimacs(const std::string& text) {
  Cnf cnf;
  std::istringstream is(text);
  std::string line;
  std::vector<int> cur;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == 'p') continue;
    std::istringstream ls(line);
    long v;
    while (ls >> v) {
      if (v == 0) {
        if (cur.empty()) continue;
        if (cur.size() > 3) throw NotThreeCNF("clause with more than three literals");
        while (cur.size() < 3) cur.push_back(cur.front());  // pad by repetition
        cnf.push_back({cur[0], cur[1], cur[2]});
        cur.clear();
      } else {
        cur.push_back((int)v);
      }
    }
  }
  if (!cur.empty()) {
    if (cur.size() > 3) throw NotThreeCNF("clause with more than three literals");
    while (cur.size() < 3) cur.push_back(cur.front());
    cnf.push_back({cur[0], cur[1], cur[2]});
  }
  return cnf;
}

std::string gen3sat_theory() {
  std::ostringstream os;
  os << "forall x. (d3s_c(x) -> (exists y. (d3s_l1(x,y) & d3s_t(y))) | "
        "(exists y. (d3s_l2(x,y) & d3s_t(y))) | (exists y. (d3s_l3(x,y) & d3s_t(y))))\n";
  os << "forall x. forall y. (d3s_o(x,y) -> (d3s_t(x) <-> !d3s_t(y)))\n";
  os << "forall x. forall y. (d3s_s(x,y) -> (d3s_t(x) <-> d3s_t(y)))\n";
  for (int j = 1; j <= 3; ++j)
    os << "forall x. ((exists y. (d3s_l" << j
       << "(x,y) & d3s_t(y))) -> (forall y. (d3s_l" << j << "(x,y) -> d3s_t(y))))\n";
  return os.str();
}

std::string gen3sat_facts(const Cnf& cnf) {
  std::ostringstream os;
  int n = (int)cnf.size();
  for (int i = 1; i <= n; ++i) {
    os << "d3s_c(a" << i << ")\n";
    for (int j = 1; j <= 3; ++j)
      os << "d3s_l" << j << "(a" << i << ",b" << i << "_" << j << ")\n";
  }
  auto bname = [](int i, int j) {
    std::ostringstream b;
    b << "b" << i + 1 << "_" << j + 1;
    return b.str();
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j)
      for (int i2 = 0; i2 < n; ++i2)
        for (int j2 = 0; j2 < 3; ++j2) {
          if (i == i2 && j == j2) continue;
          int l1 = cnf[i][j], l2 = cnf[i2][j2];
          if (l1 == -l2) os << "d3s_o(" << bname(i, j) << "," << bname(i2, j2) << ")\n";
          if (l1 == l2) os << "d3s_s(" << bname(i, j) << "," << bname(i2, j2) << ")\n";
        }
  return os.str();
}

bool cnf_satisfiable(const Cnf& cnf) {
  std::set<int> vars;
  for (const auto& cl : cnf)
    for (int l : cl) vars.insert(std::abs(l));
  std::vector<int> vlist(vars.begin(), vars.end());
  size_t n = vlist.size();
  for (uint64_t m = 0; m < (1ULL << n); ++m) {
    std::map<int, bool> val;
    for (size_t i = 0; i < n; ++i) val[vlist[i]] = (m >> i) & 1;
    bool ok = true;
    for (const auto& cl : cnf) {
      bool sat = false;
      for (int l : cl)
        if ((l > 0) == val[std::abs(l)]) sat = true;
      if (!sat) ok = false;
    }
    if (ok) return true;
  }
  return cnf.empty();
}

}  // namespace c2data
