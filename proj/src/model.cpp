#include "c2data/model.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

#include "c2data/cnf.hpp"

namespace c2data {

void Structure::ensure_pred(const Signature& sig) {
  for (const auto& p : sig.unary)
    if (!unary.count(p)) unary[p] = std::vector<uint8_t>(n, 0);
  for (const auto& r : sig.binary)
    if (!binary.count(r)) binary[r] = std::vector<uint8_t>((size_t)n * n, 0);
}

bool Structure::get1(const std::string& p, int a) const {
  auto it = unary.find(p);
  if (it == unary.end()) throw UnknownSymbol(p);
  return it->second[a] != 0;
}

bool Structure::get2(const std::string& r, int a, int b) const {
  auto it = binary.find(r);
  if (it == binary.end()) throw UnknownSymbol(r);
  return it->second[(size_t)a * n + b] != 0;
}

void Structure::set1(const std::string& p, int a, bool v) {
  auto it = unary.find(p);
  if (it == unary.end()) {
    unary[p] = std::vector<uint8_t>(n, 0);
    it = unary.find(p);
  }
  it->second[a] = v ? 1 : 0;
}

void Structure::set2(const std::string& r, int a, int b, bool v) {
  auto it = binary.find(r);
  if (it == binary.end()) {
    binary[r] = std::vector<uint8_t>((size_t)n * n, 0);
    it = binary.find(r);
  }
  it->second[(size_t)a * n + b] = v ? 1 : 0;
}

Signature Structure::signature() const {
  Signature sig;
  for (const auto& [p, _] : unary) sig.unary.insert(p);
  for (const auto& [r, _] : binary) sig.binary.insert(r);
  for (const auto& [c, _] : const_map) sig.constants.insert(c);
  return sig;
}

bool Structure::operator==(const Structure& o) const {
  return n == o.n && unary == o.unary && binary == o.binary && const_map == o.const_map;
}

// ---------------------------------------------------------------------------
// Direct evaluation
// ---------------------------------------------------------------------------

static int term_value(const Structure& A, const Term& t, const Assignment& theta) {
  if (t.is_var) {
    auto it = theta.find(t.name);
    if (it == theta.end()) throw UnknownSymbol("unbound variable " + t.name);
    return it->second;
  }
  auto it = A.const_map.find(t.name);
  if (it == A.const_map.end()) throw UnknownSymbol(t.name);
  return it->second;
}

static bool eval_rec(const Structure& A, const Formula* f, Assignment& theta) {
  switch (f->kind) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Atom: {
      if (f->args.size() == 1) return A.get1(f->pred, term_value(A, f->args[0], theta));
      return A.get2(f->pred, term_value(A, f->args[0], theta),
                    term_value(A, f->args[1], theta));
    }
    case Kind::Equal:
      return term_value(A, f->args[0], theta) == term_value(A, f->args[1], theta);
    case Kind::Not: return !eval_rec(A, f->kids[0].get(), theta);
    case Kind::And:
      return eval_rec(A, f->kids[0].get(), theta) && eval_rec(A, f->kids[1].get(), theta);
    case Kind::Or:
      return eval_rec(A, f->kids[0].get(), theta) || eval_rec(A, f->kids[1].get(), theta);
    case Kind::Implies:
      return !eval_rec(A, f->kids[0].get(), theta) || eval_rec(A, f->kids[1].get(), theta);
    case Kind::Iff:
      return eval_rec(A, f->kids[0].get(), theta) == eval_rec(A, f->kids[1].get(), theta);
    case Kind::Forall: {
      auto old = theta.find(f->qvar);
      int saved = old == theta.end() ? -1 : old->second;
      for (int b = 0; b < A.n; ++b) {
        theta[f->qvar] = b;
        if (!eval_rec(A, f->kids[0].get(), theta)) {
          if (saved < 0) theta.erase(f->qvar); else theta[f->qvar] = saved;
          return false;
        }
      }
      if (saved < 0) theta.erase(f->qvar); else theta[f->qvar] = saved;
      return true;
    }
    case Kind::Exists: {
      auto old = theta.find(f->qvar);
      int saved = old == theta.end() ? -1 : old->second;
      for (int b = 0; b < A.n; ++b) {
        theta[f->qvar] = b;
        if (eval_rec(A, f->kids[0].get(), theta)) {
          if (saved < 0) theta.erase(f->qvar); else theta[f->qvar] = saved;
          return true;
        }
      }
      if (saved < 0) theta.erase(f->qvar); else theta[f->qvar] = saved;
      return false;
    }
    case Kind::Count: {
      auto old = theta.find(f->qvar);
      int saved = old == theta.end() ? -1 : old->second;
      long cnt = 0;
      for (int b = 0; b < A.n; ++b) {
        theta[f->qvar] = b;
        if (eval_rec(A, f->kids[0].get(), theta)) ++cnt;
      }
      if (saved < 0) theta.erase(f->qvar); else theta[f->qvar] = saved;
      switch (f->ck) {
        case CountKind::Geq: return cnt >= f->bound;
        case CountKind::Leq: return cnt <= f->bound;
        case CountKind::Eq: return cnt == f->bound;
      }
      return false;
    }
  }
  return false;
}

bool evaluate(const Structure& A, const FormulaPtr& f, const Assignment& theta) {
  Assignment th = theta;
  return eval_rec(A, f.get(), th);
}

bool evaluate(const Structure& A, const FormulaPtr& f) {
  Assignment th;
  return eval_rec(A, f.get(), th);
}

bool satisfies_dataset(const Structure& A, const Dataset& d) {
  auto elem = [&](const std::string& c) {
    auto it = A.const_map.find(c);
    if (it == A.const_map.end()) throw UnknownSymbol(c);
    return it->second;
  };
  for (const auto& l : d.literals) {
    bool v;
    if (l.atom.consts.size() == 1)
      v = A.get1(l.atom.pred, elem(l.atom.consts[0]));
    else
      v = A.get2(l.atom.pred, elem(l.atom.consts[0]), elem(l.atom.consts[1]));
    if (v != l.positive) return false;
  }
  for (const auto& e : d.eqs) {
    bool same = elem(e.lhs) == elem(e.rhs);
    if (same != e.equal) return false;
  }
  return true;
}

bool evaluate_query(const Structure& A, const Query& q,
                    const std::vector<std::string>& tuple) {
  if (tuple.size() != q.head_vars.size())
    throw ArityMismatch("query tuple arity");
  Assignment theta;
  for (size_t i = 0; i < tuple.size(); ++i) {
    auto it = A.const_map.find(tuple[i]);
    if (it == A.const_map.end()) throw UnknownSymbol(tuple[i]);
    theta[q.head_vars[i]] = it->second;
  }
  // Backtracking over existential variables with per-atom pruning.
  std::function<bool(size_t)> go = [&](size_t i) -> bool {
    // check atoms whose variables are all bound
    for (const auto& at : q.atoms) {
      bool bound = true;
      for (const auto& v : at.consts)
        if (!theta.count(v)) bound = false;
      if (!bound) continue;
      bool v = at.consts.size() == 1
                   ? A.get1(at.pred, theta[at.consts[0]])
                   : A.get2(at.pred, theta[at.consts[0]], theta[at.consts[1]]);
      if (!v) return false;
    }
    if (i == q.exist_vars.size()) return true;
    for (int e = 0; e < A.n; ++e) {
      theta[q.exist_vars[i]] = e;
      if (go(i + 1)) return true;
    }
    theta.erase(q.exist_vars[i]);
    return false;
  };
  return go(0);
}

// ---------------------------------------------------------------------------
// Grounding to CNF
// ---------------------------------------------------------------------------

namespace {

struct Grounder {
  CnfSolver& s;
  int n;
  const std::map<std::string, int>& cmap;
  std::map<std::string, std::vector<int>> uvar;
  std::map<std::string, std::vector<int>> bvar;
  int lit_true_;
  std::map<std::tuple<const Formula*, int, int>, int> memo;
  std::map<const Formula*, std::vector<std::string>> fv_cache;

  Grounder(CnfSolver& solver, const Signature& sig, int n_,
           const std::map<std::string, int>& cm)
      : s(solver), n(n_), cmap(cm) {
    int tv = s.new_var();
    s.add_unit(CnfSolver::pos(tv));
    lit_true_ = CnfSolver::pos(tv);
    for (const auto& p : sig.unary) {
      auto& vs = uvar[p];
      for (int a = 0; a < n; ++a) vs.push_back(s.new_var());
    }
    for (const auto& r : sig.binary) {
      auto& vs = bvar[r];
      for (int a = 0; a < n * n; ++a) vs.push_back(s.new_var());
    }
  }

  const std::vector<std::string>& fvs(const Formula* f, const FormulaPtr& sp) {
    auto it = fv_cache.find(f);
    if (it != fv_cache.end()) return it->second;
    auto set = free_vars(sp);
    std::vector<std::string> v(set.begin(), set.end());
    if (v.size() > 2) throw FragmentViolationError("more than two free variables");
    return fv_cache.emplace(f, std::move(v)).first->second;
  }

  int term_elem(const Term& t, const std::map<std::string, int>& env) {
    if (t.is_var) {
      auto it = env.find(t.name);
      if (it == env.end()) throw UnknownSymbol("unbound variable " + t.name);
      return it->second;
    }
    auto it = cmap.find(t.name);
    if (it == cmap.end()) throw UnknownSymbol(t.name);
    return it->second;
  }

  int fresh_and(const std::vector<int>& lits) {
    int v = s.new_var();
    int out = CnfSolver::pos(v);
    std::vector<int> big{out};
    for (int l : lits) {
      s.add_clause({out ^ 1, l});
      big.push_back(l ^ 1);
    }
    s.add_clause(big);
    return out;
  }

  int fresh_or(const std::vector<int>& lits) {
    int v = s.new_var();
    int out = CnfSolver::pos(v);
    std::vector<int> big{out ^ 1};
    for (int l : lits) {
      s.add_clause({out, l ^ 1});
      big.push_back(l);
    }
    s.add_clause(big);
    return out;
  }

  int ground(const FormulaPtr& f, std::map<std::string, int>& env) {
    const Formula* fp = f.get();
    const auto& fv = fvs(fp, f);
    int k1 = fv.size() > 0 ? env.at(fv[0]) : -1;
    int k2 = fv.size() > 1 ? env.at(fv[1]) : -1;
    auto key = std::make_tuple(fp, k1, k2);
    auto mit = memo.find(key);
    if (mit != memo.end()) return mit->second;
    int lit = ground_raw(f, env);
    memo[key] = lit;
    return lit;
  }

  int ground_raw(const FormulaPtr& f, std::map<std::string, int>& env) {
    switch (f->kind) {
      case Kind::True: return lit_true_;
      case Kind::False: return lit_true_ ^ 1;
      case Kind::Atom: {
        if (f->args.size() == 1) {
          auto it = uvar.find(f->pred);
          if (it == uvar.end()) throw UnknownSymbol(f->pred);
          return CnfSolver::pos(it->second[term_elem(f->args[0], env)]);
        }
        auto it = bvar.find(f->pred);
        if (it == bvar.end()) throw UnknownSymbol(f->pred);
        int a = term_elem(f->args[0], env), b = term_elem(f->args[1], env);
        return CnfSolver::pos(it->second[a * n + b]);
      }
      case Kind::Equal: {
        int a = term_elem(f->args[0], env), b = term_elem(f->args[1], env);
        return a == b ? lit_true_ : (lit_true_ ^ 1);
      }
      case Kind::Not:
        return ground(f->kids[0], env) ^ 1;
      case Kind::And:
        return fresh_and({ground(f->kids[0], env), ground(f->kids[1], env)});
      case Kind::Or:
        return fresh_or({ground(f->kids[0], env), ground(f->kids[1], env)});
      case Kind::Implies:
        return fresh_or({ground(f->kids[0], env) ^ 1, ground(f->kids[1], env)});
      case Kind::Iff: {
        int a = ground(f->kids[0], env), b = ground(f->kids[1], env);
        // (a&b) | (!a&!b)
        return fresh_or({fresh_and({a, b}), fresh_and({a ^ 1, b ^ 1})});
      }
      case Kind::Forall:
      case Kind::Exists: {
        std::vector<int> lits;
        auto saved = env.find(f->qvar) != env.end()
                         ? std::optional<int>(env[f->qvar]) : std::nullopt;
        for (int e = 0; e < n; ++e) {
          env[f->qvar] = e;
          lits.push_back(ground(f->kids[0], env));
        }
        if (saved) env[f->qvar] = *saved; else env.erase(f->qvar);
        return f->kind == Kind::Forall ? fresh_and(lits) : fresh_or(lits);
      }
      case Kind::Count: {
        std::vector<int> lits;
        auto saved = env.find(f->qvar) != env.end()
                         ? std::optional<int>(env[f->qvar]) : std::nullopt;
        for (int e = 0; e < n; ++e) {
          env[f->qvar] = e;
          lits.push_back(ground(f->kids[0], env));
        }
        if (saved) env[f->qvar] = *saved; else env.erase(f->qvar);
        long C = f->bound;
        switch (f->ck) {
          case CountKind::Geq:
            return encode_at_least(s, lits, (int)C);
          case CountKind::Leq:
            return encode_at_least(s, lits, (int)C + 1) ^ 1;
          case CountKind::Eq: {
            int ge = encode_at_least(s, lits, (int)C);
            int gt = encode_at_least(s, lits, (int)C + 1);
            return fresh_and({ge, gt ^ 1});
          }
        }
        return lit_true_;
      }
    }
    return lit_true_;
  }
};

}  // namespace

std::vector<std::map<std::string, int>> constant_placements(
    const std::vector<std::string>& consts, int n, const Dataset& delta,
    bool surjective) {
  std::vector<std::map<std::string, int>> out;
  std::vector<int> assign(consts.size(), -1);
  auto ok_so_far = [&](size_t k) {
    for (const auto& e : delta.eqs) {
      int li = -1, ri = -1;
      for (size_t i = 0; i <= k; ++i) {
        if (consts[i] == e.lhs) li = assign[i];
        if (consts[i] == e.rhs) ri = assign[i];
      }
      if (li >= 0 && ri >= 0) {
        if (e.equal && li != ri) return false;
        if (!e.equal && li == ri) return false;
      }
    }
    return true;
  };
  std::function<void(size_t, int)> go = [&](size_t k, int used) {
    if (k == consts.size()) {
      if (surjective && used != n) return;
      std::map<std::string, int> m;
      for (size_t i = 0; i < consts.size(); ++i) m[consts[i]] = assign[i];
      out.push_back(std::move(m));
      return;
    }
    int cap = std::min(n - 1, used);  // reuse any used element or the next fresh
    for (int e = 0; e <= cap; ++e) {
      assign[k] = e;
      if (ok_so_far(k)) go(k + 1, std::max(used, e + 1));
    }
    assign[k] = -1;
  };
  if (consts.empty()) {
    if (!surjective || n == 0) out.push_back({});
    return out;
  }
  go(0, 0);
  return out;
}

namespace {

Structure extract_structure(const CnfSolver& s, const Grounder& g, int n,
                            const std::map<std::string, int>& cmap) {
  Structure A;
  A.n = n;
  for (const auto& [p, vars] : g.uvar) {
    auto& t = A.unary[p];
    t.assign(n, 0);
    for (int a = 0; a < n; ++a) t[a] = s.value(vars[a]) ? 1 : 0;
  }
  for (const auto& [r, vars] : g.bvar) {
    auto& t = A.binary[r];
    t.assign((size_t)n * n, 0);
    for (int ab = 0; ab < n * n; ++ab) t[ab] = s.value(vars[ab]) ? 1 : 0;
  }
  A.const_map = cmap;
  return A;
}

void assert_dataset(CnfSolver& s, Grounder& g, const Dataset& delta,
                    const std::map<std::string, int>& cmap) {
  for (const auto& l : delta.literals) {
    if (l.atom.consts.size() == 1) {
      auto it = g.uvar.find(l.atom.pred);
      if (it == g.uvar.end()) throw UnknownSymbol(l.atom.pred);
      int v = it->second[cmap.at(l.atom.consts[0])];
      s.add_unit(l.positive ? CnfSolver::pos(v) : CnfSolver::neg(v));
    } else {
      auto it = g.bvar.find(l.atom.pred);
      if (it == g.bvar.end()) throw UnknownSymbol(l.atom.pred);
      int a = cmap.at(l.atom.consts[0]), b = cmap.at(l.atom.consts[1]);
      int v = it->second[a * g.n + b];
      s.add_unit(l.positive ? CnfSolver::pos(v) : CnfSolver::neg(v));
    }
  }
}

}  // namespace

FindResult find_model(const std::vector<FormulaPtr>& phis, const Dataset& delta,
                      int lo, int hi, SearchBudget budget) {
  Signature sig = signature_of(phis);
  sig.merge(delta.signature());
  std::vector<std::string> consts(sig.constants.begin(), sig.constants.end());
  long remaining = budget.nodes;
  for (int n = std::max(1, lo); n <= hi; ++n) {
    for (const auto& cmap : constant_placements(consts, n, delta)) {
      CnfSolver s;
      Grounder g(s, sig, n, cmap);
      try {
        assert_dataset(s, g, delta, cmap);
        std::map<std::string, int> env;
        for (const auto& f : phis) s.add_unit(g.ground(f, env));
      } catch (const UnknownSymbol&) {
        throw;
      }
      auto st = s.solve(remaining);
      remaining -= s.conflicts() + s.decisions();
      if (st == CnfSolver::Status::Budget || remaining <= 0)
        return BudgetExceeded{budget.nodes - remaining};
      if (st == CnfSolver::Status::Sat) {
        Structure A = extract_structure(s, g, n, cmap);
        A.ensure_pred(sig);
        for (const auto& f : phis)
          if (!evaluate(A, f)) throw std::logic_error("find_model self-check failed");
        if (!satisfies_dataset(A, delta))
          throw std::logic_error("find_model dataset self-check failed");
        return A;
      }
    }
  }
  return NoneWithin{hi};
}

FindResult find_model_at(const std::vector<FormulaPtr>& phis, const Dataset& delta,
                         int n, const std::map<std::string, int>& cmap,
                         SearchBudget budget) {
  Signature sig = signature_of(phis);
  sig.merge(delta.signature());
  for (const auto& e : delta.eqs) {
    bool same = cmap.at(e.lhs) == cmap.at(e.rhs);
    if (same != e.equal) return NoneWithin{n};
  }
  CnfSolver s;
  Grounder g(s, sig, n, cmap);
  assert_dataset(s, g, delta, cmap);
  std::map<std::string, int> env;
  for (const auto& f : phis) s.add_unit(g.ground(f, env));
  auto st = s.solve(budget.nodes);
  if (st == CnfSolver::Status::Budget)
    return BudgetExceeded{s.conflicts() + s.decisions()};
  if (st == CnfSolver::Status::Unsat) return NoneWithin{n};
  Structure A = extract_structure(s, g, n, cmap);
  A.ensure_pred(sig);
  for (const auto& f : phis)
    if (!evaluate(A, f)) throw std::logic_error("find_model_at self-check failed");
  if (!satisfies_dataset(A, delta))
    throw std::logic_error("find_model_at dataset self-check failed");
  return A;
}

FindResult find_countermodel(const std::vector<FormulaPtr>& phis, const Dataset& delta,
                             const Query& q, const std::vector<std::string>& tuple,
                             int lo, int hi, SearchBudget budget) {
  if (tuple.size() != q.head_vars.size()) throw ArityMismatch("query tuple arity");
  Signature sig = signature_of(phis);
  sig.merge(delta.signature());
  for (const auto& at : q.atoms) {
    if (at.consts.size() == 1)
      sig.unary.insert(at.pred);
    else
      sig.binary.insert(at.pred);
  }
  for (const auto& c : tuple) sig.constants.insert(c);
  std::vector<std::string> consts(sig.constants.begin(), sig.constants.end());
  long remaining = budget.nodes;
  for (int n = std::max(1, lo); n <= hi; ++n) {
    for (const auto& cmap : constant_placements(consts, n, delta)) {
      CnfSolver s;
      Grounder g(s, sig, n, cmap);
      assert_dataset(s, g, delta, cmap);
      std::map<std::string, int> env;
      for (const auto& f : phis) s.add_unit(g.ground(f, env));
      // !psi(a): for every assignment of the body variables, some atom fails
      {
        std::vector<std::string> vars = q.exist_vars;
        std::vector<FormulaPtr> qatoms;
        for (const auto& at : q.atoms) {
          std::vector<Term> args;
          for (const auto& a : at.consts) args.push_back(var(a));
          qatoms.push_back(mk_atom(at.pred, args));
        }
        std::map<std::string, int> qenv;
        for (size_t i = 0; i < tuple.size(); ++i)
          qenv[q.head_vars[i]] = cmap.at(tuple[i]);
        std::vector<int> assign(vars.size(), 0);
        std::function<void(size_t)> emit = [&](size_t i) {
          if (i == vars.size()) {
            std::vector<int> clause;
            for (const auto& af : qatoms) {
              std::map<std::string, int> env2 = qenv;
              for (size_t k = 0; k < vars.size(); ++k) env2[vars[k]] = assign[k];
              clause.push_back(g.ground(af, env2) ^ 1);
            }
            s.add_clause(clause);
            return;
          }
          for (int e = 0; e < n; ++e) {
            assign[i] = e;
            emit(i + 1);
          }
        };
        emit(0);
      }
      auto st = s.solve(remaining);
      remaining -= s.conflicts() + s.decisions();
      if (st == CnfSolver::Status::Budget || remaining <= 0)
        return BudgetExceeded{budget.nodes - remaining};
      if (st == CnfSolver::Status::Sat) {
        Structure A = extract_structure(s, g, n, cmap);
        A.ensure_pred(sig);
        for (const auto& f : phis)
          if (!evaluate(A, f)) throw std::logic_error("countermodel self-check failed");
        if (!satisfies_dataset(A, delta))
          throw std::logic_error("countermodel dataset self-check failed");
        if (evaluate_query(A, q, tuple))
          throw std::logic_error("countermodel satisfies the query");
        return A;
      }
    }
  }
  return NoneWithin{hi};
}

Structure restrict_structure(const Structure& A, const std::vector<int>& elems) {
  Structure B;
  B.n = (int)elems.size();
  std::map<int, int> remap;
  for (size_t i = 0; i < elems.size(); ++i) remap[elems[i]] = (int)i;
  for (const auto& [p, tab] : A.unary) {
    auto& t = B.unary[p];
    t.assign(B.n, 0);
    for (size_t i = 0; i < elems.size(); ++i) t[i] = tab[elems[i]];
  }
  for (const auto& [r, tab] : A.binary) {
    auto& t = B.binary[r];
    t.assign((size_t)B.n * B.n, 0);
    for (size_t i = 0; i < elems.size(); ++i)
      for (size_t j = 0; j < elems.size(); ++j)
        t[i * B.n + j] = tab[(size_t)elems[i] * A.n + elems[j]];
  }
  for (const auto& [c, e] : A.const_map) {
    auto it = remap.find(e);
    if (it != remap.end()) B.const_map[c] = it->second;
  }
  return B;
}

std::vector<Structure> enumerate_models(const std::vector<FormulaPtr>& phis,
                                        const Dataset& delta, int n, int max_count,
                                        SearchBudget budget) {
  Signature sig = signature_of(phis);
  sig.merge(delta.signature());
  std::vector<std::string> consts(sig.constants.begin(), sig.constants.end());
  std::vector<Structure> out;
  long remaining = budget.nodes;
  for (const auto& cmap : constant_placements(consts, n, delta)) {
    if ((int)out.size() >= max_count || remaining <= 0) break;
    CnfSolver s;
    Grounder g(s, sig, n, cmap);
    assert_dataset(s, g, delta, cmap);
    std::map<std::string, int> env;
    for (const auto& f : phis) s.add_unit(g.ground(f, env));
    std::vector<int> proj;
    for (const auto& [p, vars] : g.uvar) proj.insert(proj.end(), vars.begin(), vars.end());
    for (const auto& [r, vars] : g.bvar) proj.insert(proj.end(), vars.begin(), vars.end());
    s.enumerate(proj, [&](const CnfSolver& sv) {
      out.push_back(extract_structure(sv, g, n, cmap));
      return (int)out.size() < max_count;
    }, remaining);
    remaining -= s.conflicts() + s.decisions();
  }
  return out;
}

}  // namespace c2data
