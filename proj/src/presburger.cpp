#include "c2data/presburger.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <variant>

namespace c2data {

std::string LinearExpr::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& [v, c] : coef) {
    if (!first) os << " + ";
    if (c == 1)
      os << v;
    else
      os << c << "*" << v;
    first = false;
  }
  if (cst != 0 || first) {
    if (!first) os << " + ";
    os << cst;
  }
  return os.str();
}

std::string LinearAtom::str() const {
  const char* r = rel == Rel::Eq ? "=" : rel == Rel::Le ? "<=" : rel == Rel::Lt ? "<"
                 : rel == Rel::Ge ? ">=" : ">";
  return "(" + lhs.str() + " " + r + " " + rhs.str() + ")";
}

CSPtr cs_atom(LinearAtom a) {
  auto n = std::make_shared<CSNode>();
  n->type = CSNode::Atom;
  n->atom = std::move(a);
  return n;
}

CSPtr cs_and(std::vector<CSPtr> kids) {
  auto n = std::make_shared<CSNode>();
  n->type = CSNode::And;
  n->kids = std::move(kids);
  return n;
}

CSPtr cs_or(std::vector<CSPtr> kids) {
  auto n = std::make_shared<CSNode>();
  n->type = CSNode::Or;
  n->kids = std::move(kids);
  return n;
}

static void collect_vars(const CSPtr& n, std::set<std::string>& out) {
  if (!n) return;
  if (n->type == CSNode::Atom) {
    for (const auto& [v, c] : n->atom.lhs.coef) out.insert(v);
    for (const auto& [v, c] : n->atom.rhs.coef) out.insert(v);
    return;
  }
  for (const auto& k : n->kids) collect_vars(k, out);
}

std::vector<std::string> ConstraintSystem::variables() const {
  std::set<std::string> s;
  collect_vars(root, s);
  for (const auto& [v, _] : pinned) s.insert(v);
  return {s.begin(), s.end()};
}

static void sexpr_rec(const CSPtr& n, int depth, std::ostringstream& os) {
  std::string ind(depth * 2, ' ');
  if (!n) {
    os << ind << "(and)\n";
    return;
  }
  if (n->type == CSNode::Atom) {
    os << ind << n->atom.str() << "\n";
    return;
  }
  os << ind << (n->type == CSNode::And ? "(and" : "(or") << "\n";
  for (const auto& k : n->kids) sexpr_rec(k, depth + 1, os);
  os << ind << ")\n";
}

std::string ConstraintSystem::to_sexpr() const {
  std::ostringstream os;
  sexpr_rec(root, 0, os);
  for (const auto& [v, c] : pinned) os << "(pin " << v << " " << c << ")\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Evaluation over N*
// ---------------------------------------------------------------------------

ExtNat eval_extnat(const LinearExpr& e, const ExtAssignment& a) {
  long long fin = e.cst;
  bool inf = false;
  for (const auto& [v, c] : e.coef) {
    if (c == 0) continue;
    auto it = a.find(v);
    if (it == a.end()) throw std::logic_error("unassigned variable " + v);
    if (it->second.is_inf()) {
      if (c < 0) throw NegativeCoefficientOnInfinite();
      inf = true;
    } else {
      fin += (long long)c * (long long)it->second.value();
    }
  }
  if (inf) return ExtNat::infinity();
  if (fin < 0)
    throw std::logic_error("expression evaluated below zero: " + e.str());
  return ExtNat((unsigned long)fin);
}

// Comparison evaluation that tolerates negative finite side values.
static bool eval_atom_signed(const LinearAtom& at, const ExtAssignment& a) {
  auto side = [&](const LinearExpr& e, bool& inf, long long& fin) {
    fin = e.cst;
    inf = false;
    for (const auto& [v, c] : e.coef) {
      if (c == 0) continue;
      auto it = a.find(v);
      if (it == a.end()) throw std::logic_error("unassigned variable " + v);
      if (it->second.is_inf()) {
        if (c < 0) throw NegativeCoefficientOnInfinite();
        inf = true;
      } else {
        fin += (long long)c * (long long)it->second.value();
      }
    }
  };
  bool li, ri;
  long long lf, rf;
  side(at.lhs, li, lf);
  side(at.rhs, ri, rf);
  int cmp;
  if (li && ri)
    cmp = 0;
  else if (li)
    cmp = 1;
  else if (ri)
    cmp = -1;
  else
    cmp = lf < rf ? -1 : lf > rf ? 1 : 0;
  switch (at.rel) {
    case Rel::Eq: return cmp == 0;
    case Rel::Le: return cmp <= 0;
    case Rel::Lt: return cmp < 0;
    case Rel::Ge: return cmp >= 0;
    case Rel::Gt: return cmp > 0;
  }
  return false;
}

bool eval_extnat(const LinearAtom& at, const ExtAssignment& a) {
  return eval_atom_signed(at, a);
}

static bool eval_tree(const CSPtr& n, const ExtAssignment& a) {
  if (!n) return true;
  switch (n->type) {
    case CSNode::Atom: return eval_atom_signed(n->atom, a);
    case CSNode::And:
      for (const auto& k : n->kids)
        if (!eval_tree(k, a)) return false;
      return true;
    case CSNode::Or:
      for (const auto& k : n->kids)
        if (eval_tree(k, a)) return true;
      return false;
  }
  return false;
}

bool check_witness(const ConstraintSystem& sys, const ExtAssignment& a, FeasMode mode) {
  if (mode == FeasMode::Nat)
    for (const auto& [v, val] : a)
      if (val.is_inf()) return false;
  for (const auto& [v, c] : sys.pinned) {
    auto it = a.find(v);
    if (it == a.end() || it->second != ExtNat((unsigned long)c)) return false;
  }
  return eval_tree(sys.root, a);
}

// ---------------------------------------------------------------------------
// Exact integer feasibility (omega-test style elimination)
// ---------------------------------------------------------------------------

namespace {

using ll = long long;

struct Lin {
  std::vector<ll> a;
  ll c = 0;

  bool constant() const {
    for (ll x : a)
      if (x != 0) return false;
    return true;
  }
};

ll gcd_ll(ll a, ll b) { return std::gcd(std::abs(a), std::abs(b)); }

ll floor_div(ll a, ll b) {
  ll q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

ll ceil_div(ll a, ll b) { return -floor_div(-a, b); }

// Symmetric residue in (-m/2, m/2].
ll mod_hat(ll a, ll m) {
  ll r = ((a % m) + m) % m;
  if (2 * r > m) r -= m;
  return r;
}

struct Omega {
  int nvars;
  long steps = 0;

  explicit Omega(int n) : nvars(n) {}

  ll eval_lin(const Lin& e, const std::vector<ll>& w) const {
    ll s = e.c;
    for (size_t v = 0; v < e.a.size(); ++v)
      if (e.a[v] != 0) s += e.a[v] * w[v];
    return s;
  }

  std::optional<std::vector<ll>> solve(std::vector<Lin> eqs, std::vector<Lin> ineqs) {
    if (++steps > 500000) throw std::runtime_error("integer elimination: step limit");

    std::vector<Lin> keep;
    for (auto& q : ineqs) {
      if (q.constant()) {
        if (q.c < 0) return std::nullopt;
        continue;
      }
      ll g = 0;
      for (ll x : q.a) g = gcd_ll(g, x);
      if (g > 1) {
        for (auto& x : q.a) x /= g;
        q.c = floor_div(q.c, g);
      }
      keep.push_back(std::move(q));
    }
    ineqs = std::move(keep);

    if (!eqs.empty()) return solve_eq(std::move(eqs), std::move(ineqs));
    return solve_ineq(std::move(ineqs));
  }

  std::optional<std::vector<ll>> solve_eq(std::vector<Lin> eqs, std::vector<Lin> ineqs) {
    Lin eq = std::move(eqs.back());
    eqs.pop_back();
    if (eq.constant()) {
      if (eq.c != 0) return std::nullopt;
      return solve(std::move(eqs), std::move(ineqs));
    }
    ll g = 0;
    for (ll x : eq.a) g = gcd_ll(g, x);
    if (eq.c % g != 0) return std::nullopt;
    if (g > 1) {
      for (auto& x : eq.a) x /= g;
      eq.c /= g;
    }
    int k = -1;
    for (int v = 0; v < (int)eq.a.size(); ++v)
      if (std::abs(eq.a[v]) == 1) {
        k = v;
        break;
      }
    if (k >= 0) {
      ll s = eq.a[k];  // +-1
      Lin expr;        // x_k = expr over the other variables
      expr.a.assign(nvars, 0);
      for (int v = 0; v < (int)eq.a.size(); ++v)
        if (v != k) expr.a[v] = -s * eq.a[v];
      expr.c = -s * eq.c;
      auto sub = [&](Lin& t) {
        ll ck = (size_t)k < t.a.size() ? t.a[k] : 0;
        if (ck == 0) return;
        t.a.resize(std::max(t.a.size(), expr.a.size()), 0);
        t.a[k] = 0;
        for (int v = 0; v < (int)expr.a.size(); ++v) t.a[v] += ck * expr.a[v];
        t.c += ck * expr.c;
      };
      for (auto& e : eqs) sub(e);
      for (auto& q : ineqs) sub(q);
      auto res = solve(std::move(eqs), std::move(ineqs));
      if (!res) return std::nullopt;
      auto& w = *res;
      w.resize(std::max(w.size(), (size_t)nvars), 0);
      w[k] = eval_lin(expr, w);
      return w;
    }
    // No unit coefficient: mod-reduction with a fresh unconstrained variable.
    int km = -1;
    for (int v = 0; v < (int)eq.a.size(); ++v)
      if (eq.a[v] != 0 && (km < 0 || std::abs(eq.a[v]) < std::abs(eq.a[km]))) km = v;
    if (eq.a[km] > 0) {
      for (auto& x : eq.a) x = -x;
      eq.c = -eq.c;
    }
    ll m = -eq.a[km] + 1;
    int sigma = nvars++;
    Lin expr;  // x_km = m*sigma - sum_{v != km} mod_hat(a_v,m)*x_v - mod_hat(c,m)
    expr.a.assign(nvars, 0);
    expr.a[sigma] = m;
    for (int v = 0; v < (int)eq.a.size(); ++v)
      if (v != km) expr.a[v] = -mod_hat(eq.a[v], m);
    expr.c = -mod_hat(eq.c, m);
    auto sub = [&](Lin& t) {
      ll ck = (size_t)km < t.a.size() ? t.a[km] : 0;
      t.a.resize(nvars, 0);
      if (ck == 0) return;
      t.a[km] = 0;
      for (int v = 0; v < nvars; ++v) t.a[v] += ck * expr.a[v];
      t.c += ck * expr.c;
    };
    Lin eq2 = eq;
    sub(eq2);
    for (auto& e : eqs) sub(e);
    for (auto& q : ineqs) sub(q);
    eqs.push_back(std::move(eq2));
    auto res = solve(std::move(eqs), std::move(ineqs));
    if (!res) return std::nullopt;
    auto& w = *res;
    w.resize(std::max(w.size(), (size_t)nvars), 0);
    w[km] = eval_lin(expr, w);
    return w;
  }

  std::optional<std::vector<ll>> solve_ineq(std::vector<Lin> ineqs) {
    int x = -1;
    {
      std::map<int, std::pair<int, int>> occ;
      std::map<int, ll> maxa, maxb;
      for (const auto& q : ineqs)
        for (int v = 0; v < (int)q.a.size(); ++v) {
          if (q.a[v] > 0) {
            occ[v].first++;
            maxa[v] = std::max(maxa[v], q.a[v]);
          } else if (q.a[v] < 0) {
            occ[v].second++;
            maxb[v] = std::max(maxb[v], -q.a[v]);
          }
        }
      if (occ.empty()) {
        for (const auto& q : ineqs)
          if (q.c < 0) return std::nullopt;
        return std::vector<ll>(nvars, 0);
      }
      long best = -1;
      for (const auto& [v, lu] : occ) {
        bool exact = maxa[v] <= 1 || maxb[v] <= 1;
        long score = (long)lu.first * (long)lu.second + (exact ? 0 : 1000000);
        if (best < 0 || score < best) {
          best = score;
          x = v;
        }
      }
    }

    std::vector<Lin> rest;
    std::vector<std::pair<ll, Lin>> lowers;  // a*x >= expr, a > 0
    std::vector<std::pair<ll, Lin>> uppers;  // b*x <= expr, b > 0
    for (const auto& q : ineqs) {
      ll cx = (size_t)x < q.a.size() ? q.a[x] : 0;
      if (cx == 0) {
        rest.push_back(q);
        continue;
      }
      Lin e = q;
      e.a.resize(std::max(e.a.size(), (size_t)x + 1), 0);
      e.a[x] = 0;
      if (cx > 0) {
        for (auto& v : e.a) v = -v;
        e.c = -e.c;
        lowers.push_back({cx, std::move(e)});
      } else {
        uppers.push_back({-cx, std::move(e)});
      }
    }

    auto pick_value = [&](const std::vector<ll>& w) -> ll {
      bool has_lo = false, has_hi = false;
      ll lo = 0, hi = 0;
      for (const auto& [a, e] : lowers) {
        ll b = ceil_div(eval_lin(e, w), a);
        if (!has_lo || b > lo) lo = b, has_lo = true;
      }
      for (const auto& [b, e] : uppers) {
        ll t = floor_div(eval_lin(e, w), b);
        if (!has_hi || t < hi) hi = t, has_hi = true;
      }
      if (has_lo) return lo;
      if (has_hi) return std::min(hi, (ll)0);
      return 0;
    };

    if (lowers.empty() || uppers.empty()) {
      auto res = solve({}, std::move(rest));
      if (!res) return std::nullopt;
      auto& w = *res;
      w.resize(std::max(w.size(), (size_t)nvars), 0);
      w[x] = pick_value(w);
      return w;
    }

    bool all_unit_low = true, all_unit_up = true;
    for (const auto& [a, e] : lowers)
      if (a > 1) all_unit_low = false;
    for (const auto& [b, e] : uppers)
      if (b > 1) all_unit_up = false;
    bool exact = all_unit_low || all_unit_up;

    auto shadow = [&](bool dark) {
      std::vector<Lin> sys = rest;
      for (const auto& [a, p] : lowers)
        for (const auto& [b, q] : uppers) {
          Lin t;
          t.a.assign(std::max({p.a.size(), q.a.size(), (size_t)1}), 0);
          for (size_t v = 0; v < q.a.size(); ++v) t.a[v] += a * q.a[v];
          for (size_t v = 0; v < p.a.size(); ++v) t.a[v] -= b * p.a[v];
          t.c = a * q.c - b * p.c;
          if (dark) t.c -= (a - 1) * (b - 1);
          sys.push_back(std::move(t));
        }
      return sys;
    };

    if (exact) {
      auto res = solve({}, shadow(false));
      if (!res) return std::nullopt;
      auto& w = *res;
      w.resize(std::max(w.size(), (size_t)nvars), 0);
      w[x] = pick_value(w);
      return w;
    }

    {
      auto res = solve({}, shadow(true));
      if (res) {
        auto& w = *res;
        w.resize(std::max(w.size(), (size_t)nvars), 0);
        w[x] = pick_value(w);
        return w;
      }
    }

    ll bmax = 1;
    for (const auto& [b, q] : uppers) bmax = std::max(bmax, b);
    for (const auto& [a, p] : lowers) {
      if (a <= 1) continue;
      ll imax = (a * bmax - a - bmax) / bmax;
      for (ll i = 0; i <= imax; ++i) {
        Lin eq;
        eq.a.assign(std::max(p.a.size(), (size_t)x + 1), 0);
        eq.a[x] = a;
        for (size_t v = 0; v < p.a.size(); ++v) eq.a[v] -= p.a[v];
        eq.c = -p.c - i;
        auto res = solve({eq}, ineqs);
        if (res) return res;
      }
    }
    return std::nullopt;
  }
};

}  // namespace

std::optional<std::map<std::string, long>> solve_nat_conjunction(
    const std::vector<LinearAtom>& atoms) {
  std::set<std::string> vars;
  for (const auto& at : atoms) {
    for (const auto& [v, c] : at.lhs.coef) vars.insert(v);
    for (const auto& [v, c] : at.rhs.coef) vars.insert(v);
  }
  std::vector<std::string> order(vars.begin(), vars.end());
  std::map<std::string, int> id;
  for (size_t i = 0; i < order.size(); ++i) id[order[i]] = (int)i;
  int n = (int)order.size();

  auto to_lin = [&](const LinearExpr& lhs, const LinearExpr& rhs, ll korr) {
    Lin t;
    t.a.assign(n, 0);
    for (const auto& [v, c] : lhs.coef) t.a[id[v]] += c;
    for (const auto& [v, c] : rhs.coef) t.a[id[v]] -= c;
    t.c = lhs.cst - rhs.cst + korr;
    return t;
  };

  std::vector<Lin> eqs, ineqs;
  for (const auto& at : atoms) {
    switch (at.rel) {
      case Rel::Eq: eqs.push_back(to_lin(at.lhs, at.rhs, 0)); break;
      case Rel::Ge: ineqs.push_back(to_lin(at.lhs, at.rhs, 0)); break;
      case Rel::Gt: ineqs.push_back(to_lin(at.lhs, at.rhs, -1)); break;
      case Rel::Le: ineqs.push_back(to_lin(at.rhs, at.lhs, 0)); break;
      case Rel::Lt: ineqs.push_back(to_lin(at.rhs, at.lhs, -1)); break;
    }
  }
  for (int v = 0; v < n; ++v) {
    Lin t;
    t.a.assign(n, 0);
    t.a[v] = 1;
    ineqs.push_back(std::move(t));
  }

  Omega om(n);
  auto res = om.solve(std::move(eqs), std::move(ineqs));
  if (!res) return std::nullopt;
  res->resize(std::max(res->size(), (size_t)n), 0);
  std::map<std::string, long> out;
  for (int v = 0; v < n; ++v) out[order[v]] = (long)(*res)[v];
  return out;
}

// ---------------------------------------------------------------------------
// feasible(): disjunct iteration + infinite-subset enumeration
// ---------------------------------------------------------------------------

static bool enumerate_selections(const CSPtr& n, std::vector<const LinearAtom*>& acc,
                                 const std::function<bool()>& leaf);

static bool enum_sel_list(const std::vector<CSPtr>& kids, size_t i,
                          std::vector<const LinearAtom*>& acc,
                          const std::function<bool()>& leaf) {
  if (i == kids.size()) return leaf();
  return enumerate_selections(kids[i], acc,
                              [&]() { return enum_sel_list(kids, i + 1, acc, leaf); });
}

static bool enumerate_selections(const CSPtr& n, std::vector<const LinearAtom*>& acc,
                                 const std::function<bool()>& leaf) {
  if (!n) return leaf();
  switch (n->type) {
    case CSNode::Atom: {
      acc.push_back(&n->atom);
      bool r = leaf();
      acc.pop_back();
      return r;
    }
    case CSNode::And:
      return enum_sel_list(n->kids, 0, acc, leaf);
    case CSNode::Or:
      for (const auto& k : n->kids)
        if (enumerate_selections(k, acc, leaf)) return true;
      return false;
  }
  return false;
}

static std::string conj_signature(const std::vector<const LinearAtom*>& acc) {
  std::vector<std::string> ss;
  ss.reserve(acc.size());
  for (auto* a : acc) ss.push_back(a->str());
  std::sort(ss.begin(), ss.end());
  ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
  std::string out;
  for (auto& s : ss) out += s;
  return out;
}

static FeasResult feasible_nat(const ConstraintSystem& sys) {
  std::set<std::string> failed;
  std::optional<Witness> found;
  std::vector<const LinearAtom*> acc;
  std::vector<LinearAtom> pins;
  for (const auto& [v, c] : sys.pinned) {
    LinearAtom at;
    at.lhs = LinearExpr::variable(v);
    at.rhs = LinearExpr(c);
    at.rel = Rel::Eq;
    pins.push_back(at);
  }
  enumerate_selections(sys.root, acc, [&]() {
    std::string sig = conj_signature(acc);
    if (failed.count(sig)) return false;
    std::vector<LinearAtom> atoms = pins;
    for (auto* a : acc) atoms.push_back(*a);
    auto w = solve_nat_conjunction(atoms);
    if (!w) {
      failed.insert(sig);
      return false;
    }
    Witness wit;
    for (const auto& [v, val] : *w) wit.values[v] = ExtNat((unsigned long)val);
    found = std::move(wit);
    return true;
  });
  if (found) {
    for (const auto& v : sys.variables())
      if (!found->values.count(v)) found->values[v] = ExtNat(0);
    return *found;
  }
  return Infeasible{};
}

static CSPtr partial_eval_inf(const CSPtr& n, const std::set<std::string>& S,
                              bool& constant, bool& cval) {
  constant = false;
  if (!n) {
    constant = true;
    cval = true;
    return nullptr;
  }
  if (n->type == CSNode::Atom) {
    const auto& at = n->atom;
    auto side_inf = [&](const LinearExpr& e, LinearExpr& out) -> bool {
      bool inf = false;
      out.cst = e.cst;
      for (const auto& [v, c] : e.coef) {
        if (c == 0) continue;
        if (S.count(v)) {
          if (c < 0) throw NegativeCoefficientOnInfinite();
          inf = true;
        } else {
          out.coef[v] = c;
        }
      }
      return inf;
    };
    LinearExpr l2, r2;
    bool li = side_inf(at.lhs, l2);
    bool ri = side_inf(at.rhs, r2);
    if (!li && !ri) {
      auto m = std::make_shared<CSNode>();
      m->type = CSNode::Atom;
      m->atom = LinearAtom{l2, r2, at.rel};
      return m;
    }
    int cmp = (li && ri) ? 0 : li ? 1 : -1;
    bool v = false;
    switch (at.rel) {
      case Rel::Eq: v = cmp == 0; break;
      case Rel::Le: v = cmp <= 0; break;
      case Rel::Lt: v = cmp < 0; break;
      case Rel::Ge: v = cmp >= 0; break;
      case Rel::Gt: v = cmp > 0; break;
    }
    constant = true;
    cval = v;
    return nullptr;
  }
  std::vector<CSPtr> kids;
  bool is_and = n->type == CSNode::And;
  for (const auto& k : n->kids) {
    bool kc, kv;
    auto k2 = partial_eval_inf(k, S, kc, kv);
    if (kc) {
      if (is_and && !kv) {
        constant = true;
        cval = false;
        return nullptr;
      }
      if (!is_and && kv) {
        constant = true;
        cval = true;
        return nullptr;
      }
      continue;
    }
    kids.push_back(k2);
  }
  if (kids.empty()) {
    constant = true;
    cval = is_and;
    return nullptr;
  }
  if (kids.size() == 1) return kids[0];
  auto m = std::make_shared<CSNode>();
  m->type = n->type;
  m->kids = std::move(kids);
  return m;
}

FeasResult feasible(const ConstraintSystem& sys, FeasMode mode, FeasConfig cfg) {
  auto vars = sys.variables();
  if (vars.size() > cfg.var_limit) throw VariableLimitExceeded(vars.size());
  if (mode == FeasMode::Nat) return feasible_nat(sys);

  std::set<std::string> pinset;
  for (const auto& [v, c] : sys.pinned) pinset.insert(v);
  std::vector<std::string> frees;
  for (const auto& v : vars)
    if (!pinset.count(v)) frees.push_back(v);

  size_t nf = frees.size();
  if (nf > 20) throw VariableLimitExceeded(nf);
  std::vector<uint32_t> masks;
  masks.reserve(1u << nf);
  for (uint32_t m = 0; m < (1u << nf); ++m) masks.push_back(m);
  std::stable_sort(masks.begin(), masks.end(), [](uint32_t a, uint32_t b) {
    int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
    if (pa != pb) return pa < pb;
    return a < b;
  });
  for (uint32_t m : masks) {
    std::set<std::string> S;
    for (size_t i = 0; i < nf; ++i)
      if (m & (1u << i)) S.insert(frees[i]);
    bool constant, cval;
    CSPtr residue;
    try {
      residue = partial_eval_inf(sys.root, S, constant, cval);
    } catch (const NegativeCoefficientOnInfinite&) {
      if (S.empty()) throw;
      continue;
    }
    ConstraintSystem resid;
    resid.pinned = sys.pinned;
    resid.root = constant ? nullptr : residue;
    if (constant && !cval) continue;
    auto sub = feasible_nat(resid);
    if (std::holds_alternative<Witness>(sub)) {
      Witness w = std::get<Witness>(sub);
      for (const auto& v : S) w.values[v] = ExtNat::infinity();
      for (const auto& v : vars)
        if (!w.values.count(v)) w.values[v] = ExtNat(0);
      return w;
    }
  }
  return Infeasible{};
}

}  // namespace c2data
