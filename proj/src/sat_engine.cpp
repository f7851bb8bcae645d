#include "c2data/sat_engine.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

#include "c2data/cnf.hpp"

namespace c2data {

// ---------------------------------------------------------------------------
// Data-level candidate encoding: quotients of const(Delta) satisfying Delta,
// the alpha clause on distinct pairs, and the one-variable closure of alpha.
// ---------------------------------------------------------------------------

namespace {

struct DataEncoding {
  std::vector<std::string> consts;
  Signature sig;  // theory signature + foreign dataset predicates
  CnfSolver solver;
  std::map<std::pair<int, int>, int> eqv;               // i<j -> var
  std::map<std::string, std::vector<int>> ua;           // pred -> per const
  std::map<std::string, std::vector<int>> ba;           // pred -> per const pair
  int lit_true;
  std::map<std::tuple<const Formula*, int, int>, int> memo;

  int eq_lit(int i, int j) {
    if (i == j) return lit_true;
    if (i > j) std::swap(i, j);
    return CnfSolver::pos(eqv.at({i, j}));
  }

  DataEncoding(const Dataset& delta, const NormalTheoryC2& t) {
    sig = t.sigma;
    sig.merge(delta.signature());
    auto cs = delta.constants();
    consts.assign(cs.begin(), cs.end());
    int K = (int)consts.size();

    int tv = solver.new_var();
    solver.add_unit(CnfSolver::pos(tv));
    lit_true = CnfSolver::pos(tv);

    for (int i = 0; i < K; ++i)
      for (int j = i + 1; j < K; ++j) eqv[{i, j}] = solver.new_var();
    for (const auto& p : sig.unary) {
      auto& v = ua[p];
      for (int i = 0; i < K; ++i) v.push_back(solver.new_var());
    }
    for (const auto& r : sig.binary) {
      auto& v = ba[r];
      for (int i = 0; i < K * K; ++i) v.push_back(solver.new_var());
    }

    // transitivity of the merge relation
    for (int i = 0; i < K; ++i)
      for (int j = i + 1; j < K; ++j)
        for (int k = j + 1; k < K; ++k) {
          int ij = eq_lit(i, j), jk = eq_lit(j, k), ik = eq_lit(i, k);
          solver.add_clause({ij ^ 1, jk ^ 1, ik});
          solver.add_clause({ij ^ 1, ik ^ 1, jk});
          solver.add_clause({ik ^ 1, jk ^ 1, ij});
        }
    // congruence
    for (int i = 0; i < K; ++i)
      for (int j = i + 1; j < K; ++j) {
        int e = eq_lit(i, j);
        for (const auto& [p, vars] : ua) {
          solver.add_clause({e ^ 1, CnfSolver::neg(vars[i]), CnfSolver::pos(vars[j])});
          solver.add_clause({e ^ 1, CnfSolver::pos(vars[i]), CnfSolver::neg(vars[j])});
        }
        for (const auto& [r, vars] : ba)
          for (int k = 0; k < K; ++k) {
            auto cl = [&](int a, int b) {
              solver.add_clause({e ^ 1, CnfSolver::neg(vars[a]), CnfSolver::pos(vars[b])});
              solver.add_clause({e ^ 1, CnfSolver::pos(vars[a]), CnfSolver::neg(vars[b])});
            };
            cl(i * K + k, j * K + k);
            cl(k * K + i, k * K + j);
          }
      }
    // dataset literals
    for (const auto& l : delta.literals) {
      int lit;
      if (l.atom.consts.size() == 1) {
        lit = CnfSolver::pos(ua.at(l.atom.pred)[cidx(l.atom.consts[0])]);
      } else {
        lit = CnfSolver::pos(
            ba.at(l.atom.pred)[cidx(l.atom.consts[0]) * K + cidx(l.atom.consts[1])]);
      }
      solver.add_unit(l.positive ? lit : (lit ^ 1));
    }
    for (const auto& e : delta.eqs) {
      int lit = eq_lit(cidx(e.lhs), cidx(e.rhs));
      solver.add_unit(e.equal ? lit : (lit ^ 1));
    }
    // one-variable closure per constant
    for (int i = 0; i < K; ++i)
      if (t.one_var->kind != Kind::True) solver.add_unit(ground(t.one_var, i, i));
    // alpha on distinct pairs
    if (t.alpha->kind != Kind::True)
      for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j) {
          if (i == j) continue;
          solver.add_clause({eq_lit(i, j), ground(t.alpha, i, j)});
        }
  }

  int cidx(const std::string& c) const {
    auto it = std::lower_bound(consts.begin(), consts.end(), c);
    return (int)(it - consts.begin());
  }

  int fresh_and(const std::vector<int>& lits) {
    int v = solver.new_var();
    int out = CnfSolver::pos(v);
    std::vector<int> big{out};
    for (int l : lits) {
      solver.add_clause({out ^ 1, l});
      big.push_back(l ^ 1);
    }
    solver.add_clause(big);
    return out;
  }

  int fresh_or(const std::vector<int>& lits) {
    int v = solver.new_var();
    int out = CnfSolver::pos(v);
    std::vector<int> big{out ^ 1};
    for (int l : lits) {
      solver.add_clause({out, l ^ 1});
      big.push_back(l);
    }
    solver.add_clause(big);
    return out;
  }

  // Grounds a quantifier-free two-variable formula with x -> constant i,
  // y -> constant j.
  int ground(const FormulaPtr& f, int i, int j) {
    auto key = std::make_tuple(f.get(), i, j);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    int lit = ground_raw(f, i, j);
    memo[key] = lit;
    return lit;
  }

  int ground_raw(const FormulaPtr& f, int i, int j) {
    int K = (int)consts.size();
    switch (f->kind) {
      case Kind::True: return lit_true;
      case Kind::False: return lit_true ^ 1;
      case Kind::Atom: {
        auto at = [&](const Term& t) { return t.name == "x" ? i : j; };
        if (f->args.size() == 1) return CnfSolver::pos(ua.at(f->pred)[at(f->args[0])]);
        return CnfSolver::pos(ba.at(f->pred)[at(f->args[0]) * K + at(f->args[1])]);
      }
      case Kind::Equal: {
        auto at = [&](const Term& t) { return t.name == "x" ? i : j; };
        int a = at(f->args[0]), b = at(f->args[1]);
        return a == b ? lit_true : eq_lit(a, b);
      }
      case Kind::Not: return ground(f->kids[0], i, j) ^ 1;
      case Kind::And: return fresh_and({ground(f->kids[0], i, j), ground(f->kids[1], i, j)});
      case Kind::Or: return fresh_or({ground(f->kids[0], i, j), ground(f->kids[1], i, j)});
      case Kind::Implies:
        return fresh_or({ground(f->kids[0], i, j) ^ 1, ground(f->kids[1], i, j)});
      case Kind::Iff: {
        int a = ground(f->kids[0], i, j), b = ground(f->kids[1], i, j);
        return fresh_or({fresh_and({a, b}), fresh_and({a ^ 1, b ^ 1})});
      }
      default:
        throw std::logic_error("quantifier in a data-level matrix");
    }
  }

  std::vector<int> projection() const {
    std::vector<int> out;
    for (const auto& [pr, v] : eqv) out.push_back(v);
    for (const auto& [p, vs] : ua) out.insert(out.end(), vs.begin(), vs.end());
    for (const auto& [r, vs] : ba) out.insert(out.end(), vs.begin(), vs.end());
    return out;
  }

  Structure extract() const {
    int K = (int)consts.size();
    // union-find over merged constants
    std::vector<int> parent(K);
    for (int i = 0; i < K; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (const auto& [pr, v] : eqv)
      if (solver.value(v)) {
        int a = find(pr.first), b = find(pr.second);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    std::map<int, int> elem;  // representative -> element index
    std::vector<int> rep_of;
    for (int i = 0; i < K; ++i) {
      int r = find(i);
      if (!elem.count(r)) {
        elem[r] = (int)rep_of.size();
        rep_of.push_back(r);
      }
    }
    Structure D;
    D.n = (int)rep_of.size();
    for (const auto& [p, vs] : ua) {
      auto& t = D.unary[p];
      t.assign(D.n, 0);
      for (int e = 0; e < D.n; ++e) t[e] = solver.value(vs[rep_of[e]]) ? 1 : 0;
    }
    for (const auto& [r, vs] : ba) {
      auto& t = D.binary[r];
      t.assign((size_t)D.n * D.n, 0);
      for (int e = 0; e < D.n; ++e)
        for (int g = 0; g < D.n; ++g)
          t[(size_t)e * D.n + g] = solver.value(vs[rep_of[e] * K + rep_of[g]]) ? 1 : 0;
    }
    for (int i = 0; i < K; ++i) D.const_map[consts[i]] = elem.at(find(i));
    return D;
  }
};

}  // namespace

std::vector<Structure> enumerate_dplus(const Dataset& delta, const NormalTheoryC2& t,
                                       long max_count, bool* capped) {
  if (capped) *capped = false;
  std::vector<Structure> out;
  if (delta.constants().empty()) {
    Structure empty;
    empty.n = 0;
    Signature sig = t.sigma;
    sig.merge(delta.signature());
    for (const auto& p : sig.unary) empty.unary[p] = {};
    for (const auto& r : sig.binary) empty.binary[r] = {};
    out.push_back(empty);
    return out;
  }
  DataEncoding enc(delta, t);
  auto proj = enc.projection();
  auto st = enc.solver.enumerate(proj, [&](const CnfSolver&) {
    out.push_back(enc.extract());
    return (long)out.size() < max_count;
  });
  if (st == CnfSolver::Status::Sat && capped) *capped = true;  // stopped early
  if (st == CnfSolver::Status::Budget && capped) *capped = true;
  return out;
}

// ---------------------------------------------------------------------------
// Valid star pool
// ---------------------------------------------------------------------------

std::vector<StarType> valid_star_pool(const NormalTheoryC2& t, const SignatureStar& s,
                                      long cap, bool* capped) {
  if (capped) *capped = false;
  std::vector<StarType> out;
  int nb = s.bits();
  if (nb > 24 || (1L << nb) > cap) {
    if (capped) *capped = true;
    return out;
  }
  long m = (long)s.counting_preds.size();
  std::vector<int> cbits;
  for (long h = 0; h < m; ++h) cbits.push_back(s.binary_index(s.counting_preds[h]));

  // chi-valid 1-types
  std::vector<OneType> pis;
  for (uint64_t v = 0; v < (1ULL << nb); ++v) {
    OneType pi{v};
    if (t.one_var->kind == Kind::True || eval_under_one_type(s, t.one_var, pi))
      pis.push_back(pi);
  }

  long iter = 0;
  for (const auto& pi : pis) {
    if (m == 0) {
      StarType st;
      st.pi = pi;
      out.push_back(st);
      if ((long)out.size() > cap) {
        if (capped) *capped = true;
        return out;
      }
      continue;
    }
    // alpha-valid messages from pi toward chi-valid targets
    std::vector<TwoType> msgs;
    for (const auto& ty : pis) {
      uint64_t crossmax = 1ULL << (2 * s.b());
      for (uint64_t cr = 0; cr < crossmax; ++cr) {
        if (++iter > cap * 64) {
          if (capped) *capped = true;
          return out;
        }
        TwoType mu;
        mu.tx = pi;
        mu.ty = ty;
        mu.cross = cr;
        if (!is_message(s, mu)) continue;
        if (!eval_under_two_type(s, t.alpha, mu)) continue;
        if (!eval_under_two_type(s, t.alpha, invert(mu))) continue;
        msgs.push_back(mu);
      }
    }
    // exact per-predicate sums via DFS over message multiplicities
    std::vector<long> rem(m);
    for (long h = 0; h < m; ++h) rem[h] = s.counting_bounds[h];
    std::map<TwoType, ExtNat> counts;
    std::function<void(size_t)> go = [&](size_t i) {
      if ((long)out.size() > cap) {
        if (capped) *capped = true;
        return;
      }
      bool all_zero = true;
      for (long h = 0; h < m; ++h)
        if (rem[h] != 0) all_zero = false;
      if (i == msgs.size()) {
        if (!all_zero) return;
        StarType st;
        st.pi = pi;
        st.counts = counts;
        if (!star_chromatic(s, st)) return;
        out.push_back(st);
        return;
      }
      const TwoType& mu = msgs[i];
      long maxn = t.C;
      for (long h = 0; h < m; ++h)
        if (mu.fwd(cbits[h])) maxn = std::min(maxn, rem[h]);
      for (long nmu = 0; nmu <= maxn; ++nmu) {
        if (nmu > 0) {
          for (long h = 0; h < m; ++h)
            if (mu.fwd(cbits[h])) rem[h] -= 1;
          counts[mu] = ExtNat((unsigned long)nmu);
        }
        go(i + 1);
        if ((long)out.size() > cap) return;
      }
      // undo
      long taken = counts.count(mu) ? (long)counts[mu].value() : 0;
      for (long h = 0; h < m; ++h)
        if (mu.fwd(cbits[h])) rem[h] += taken;
      counts.erase(mu);
    };
    go(0);
    if (capped && *capped) return out;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Certificates
// ---------------------------------------------------------------------------

namespace {

std::vector<const LinearAtom*> collect_atoms(const CSPtr& n,
                                             std::vector<const LinearAtom*> acc = {}) {
  std::function<void(const CSPtr&, std::vector<const LinearAtom*>&)> go =
      [&](const CSPtr& m, std::vector<const LinearAtom*>& a) {
        if (!m) return;
        if (m->type == CSNode::Atom) {
          a.push_back(&m->atom);
          return;
        }
        for (const auto& k : m->kids) go(k, a);
      };
  go(n, acc);
  return acc;
}

LinearAtom sum_lower_bound_atom(size_t n_vars, long bound) {
  LinearExpr sum;
  for (size_t k = 0; k < n_vars; ++k) sum.add("w" + std::to_string(k), 1);
  return LinearAtom{sum, LinearExpr(bound), Rel::Ge};
}

// Shared frame-branch certificate construction from an explicit model of
// phi* + Delta (over the base signature + dataset predicates).
SatCertificate certificate_from_model(const Structure& model,
                                      const NormalTheoryC2& t, const Dataset& delta,
                                      const SignatureStar& S, bool finite_mode,
                                      int padding_override) {
  Structure A = model;
  for (const auto& p : S.padding) A.unary[p].assign(A.n, 0);
  auto& obs = A.unary[S.observable];
  obs.assign(A.n, 0);
  std::set<int> dset;
  for (const auto& [c, e] : A.const_map) dset.insert(e);
  for (int e : dset) obs[e] = 1;

  Structure B = recolor(A, S);
  auto [F, H] = extract_frame(B, S);

  SatCertificate cert;
  cert.finite_mode = finite_mode;
  cert.small_model_branch = false;
  cert.padding_override = padding_override;
  cert.frame = F;
  cert.solution = H.w;

  // D+ = restriction to the constant-interpreting elements (with foreign
  // predicate tables inherited from the model)
  std::vector<int> delems(dset.begin(), dset.end());
  cert.dplus = restrict_structure(B, delems);
  // foreign predicates: copy from the original model's restriction
  {
    Structure orig_restr = restrict_structure(model, delems);
    for (const auto& [p, tab] : orig_restr.unary)
      if (!cert.dplus.unary.count(p)) cert.dplus.unary[p] = tab;
    for (const auto& [r, tab] : orig_restr.binary)
      if (!cert.dplus.binary.count(r)) cert.dplus.binary[r] = tab;
  }

  // delta: element -> star index
  std::map<StarType, int> star_index;
  for (size_t k = 0; k < F.stars.size(); ++k) star_index[F.stars[k]] = (int)k;
  cert.delta_star.assign(delems.size(), -1);
  cert.delta_counts.assign(F.n_observable, 0);
  for (size_t i = 0; i < delems.size(); ++i) {
    auto st = star_of(B, delems[i], S);
    int k = star_index.at(st);
    cert.delta_star[i] = k;
    cert.delta_counts[k] += 1;
  }

  // chosen atoms: the inequalities of E true under the histogram
  auto sys = assemble_constraints(F, S);
  ExtAssignment a;
  for (size_t k = 0; k < H.w.size(); ++k) a["w" + std::to_string(k)] = H.w[k];
  for (const auto* at : collect_atoms(sys.root))
    if (eval_extnat(*at, a)) cert.chosen_atoms.push_back(*at);
  return cert;
}

}  // namespace

bool verify_certificate(const SatCertificate& cert, const NormalTheoryC2& t,
                        const Dataset& delta, long realize_cap) {
  try {
    if (cert.small_model_branch) {
      if (cert.small.n < 1 || cert.small.n > t.C) return false;
      return evaluate(cert.small, t.original) && satisfies_dataset(cert.small, delta);
    }
    auto S = SignatureStar::make(t, cert.padding_override);
    const auto& F = cert.frame;
    const auto& dp = cert.dplus;

    // step 1: D+ satisfies Delta and the alpha clause (plus the one-variable
    // closure, which every spliceable structure satisfies)
    if (!satisfies_dataset(dp, delta)) return false;
    for (int i = 0; i < dp.n; ++i) {
      if (t.one_var->kind != Kind::True &&
          !eval_under_one_type(S, t.one_var, one_type_of(dp, S, i)))
        return false;
      for (int j = 0; j < dp.n; ++j) {
        if (i == j) continue;
        if (!eval_under_two_type(S, t.alpha, two_type_of(dp, S, i, j))) return false;
      }
    }
    // step 2: the frame
    if (!F.well_formed(S)) return false;
    if (!F.chromatic(S)) return false;
    if (!F.bounded(t.C)) return false;
    if (!frame_models(F, t, S)) return false;
    // step 3: delta conditions (a) and (b), and the tallies
    if ((int)cert.delta_star.size() != dp.n) return false;
    if ((int)cert.delta_counts.size() != F.n_observable) return false;
    std::vector<long> tally(F.n_observable, 0);
    for (int d = 0; d < dp.n; ++d) {
      int k = cert.delta_star[d];
      if (k < 0 || k >= F.n_observable) return false;
      const StarType& sk = F.stars[k];
      if (!(sk.pi == one_type_of(dp, S, d))) return false;
      // (b): observable message counts match the data structure
      std::map<TwoType, long> within;
      for (int e = 0; e < dp.n; ++e) {
        if (e == d) continue;
        TwoType tau = two_type_of(dp, S, d, e);
        if (is_message(S, tau)) within[tau]++;
      }
      int obs_idx = S.unary_index(S.observable);
      for (const auto& [mu, cnt] : within) {
        if (!((mu.ty.bits >> obs_idx) & 1)) return false;  // o marks all of D
        auto it = sk.counts.find(mu);
        ExtNat have = it == sk.counts.end() ? ExtNat(0) : it->second;
        if (!(have == ExtNat((unsigned long)cnt))) return false;
      }
      for (const auto& [mu, cnt] : sk.counts) {
        bool mu_obs = ((tp1(mu).bits >> obs_idx) & 1) && ((tp2(mu).bits >> obs_idx) & 1);
        if (!mu_obs) continue;
        long want = within.count(mu) ? within.at(mu) : 0;
        if (!(cnt == ExtNat((unsigned long)want))) return false;
      }
      tally[k] += 1;
    }
    for (int k = 0; k < F.n_observable; ++k)
      if (tally[k] != cert.delta_counts[k]) return false;
    // steps 4-5: the chosen inequalities make E true, and the solution
    // satisfies them together with the pins
    auto sys = assemble_constraints(F, S);
    {
      std::set<std::string> chosen;
      for (const auto& at : cert.chosen_atoms) chosen.insert(at.str());
      std::function<bool(const CSPtr&)> sat = [&](const CSPtr& n) -> bool {
        if (!n) return true;
        if (n->type == CSNode::Atom) return chosen.count(n->atom.str()) != 0;
        if (n->type == CSNode::And) {
          for (const auto& k : n->kids)
            if (!sat(k)) return false;
          return true;
        }
        for (const auto& k : n->kids)
          if (sat(k)) return true;
        return false;
      };
      if (!sat(sys.root)) return false;
      // the chosen atoms must come from E
      std::set<std::string> all;
      for (const auto* at : collect_atoms(sys.root)) all.insert(at->str());
      for (const auto& at : cert.chosen_atoms)
        if (!all.count(at.str())) return false;
    }
    if (cert.solution.size() != F.stars.size()) return false;
    ExtAssignment w;
    long wsum_fin = 0;
    bool wsum_inf = false;
    for (size_t k = 0; k < cert.solution.size(); ++k) {
      w["w" + std::to_string(k)] = cert.solution[k];
      if (cert.solution[k].is_inf())
        wsum_inf = true;
      else
        wsum_fin += (long)cert.solution[k].value();
      if (cert.finite_mode && cert.solution[k].is_inf()) return false;
    }
    for (const auto& at : cert.chosen_atoms)
      if (!eval_extnat(at, w)) return false;
    for (int k = 0; k < F.n_observable; ++k)
      if (!(cert.solution[k] == ExtNat((unsigned long)cert.delta_counts[k])))
        return false;
    // models relevant to the frame branch have more than C elements
    if (!wsum_inf && wsum_fin < t.C + 1) return false;
    // the solution also satisfies the literal conditions
    if (!check_solution(F, cert.solution, S)) return false;

    // splice replay at desk scale: realize and re-check the joint model
    if (!wsum_inf && wsum_fin <= realize_cap) {
      auto spliced = certificate_model(cert, t, delta, realize_cap);
      if (spliced) {
        if (!evaluate(*spliced, t.phi_star())) return false;
        if (!satisfies_dataset(*spliced, delta)) return false;
      }
    }
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

std::optional<Structure> certificate_model(const SatCertificate& cert,
                                           const NormalTheoryC2& t,
                                           const Dataset& delta, long cap) {
  if (cert.small_model_branch) return cert.small;
  long total = 0;
  for (const auto& w : cert.solution) {
    if (w.is_inf()) return std::nullopt;
    total += (long)w.value();
  }
  if (total > cap) return std::nullopt;
  auto S = SignatureStar::make(t, cert.padding_override);
  const auto& F = cert.frame;
  const auto& dp = cert.dplus;
  auto rr = realize_frame(F, cert.solution, t, S, cap);
  if (!std::holds_alternative<Structure>(rr)) return std::nullopt;
  Structure R = std::get<Structure>(rr);
  std::vector<long> offset(F.stars.size(), 0);
  std::vector<long> base(F.stars.size(), 0);
  {
    long acc = 0;
    for (size_t k = 0; k < F.stars.size(); ++k) {
      base[k] = acc;
      acc += (long)cert.solution[k].value();
    }
  }
  std::vector<int> dmap(dp.n, -1);
  for (int d = 0; d < dp.n; ++d) {
    int k = cert.delta_star[d];
    dmap[d] = (int)(base[k] + offset[k]++);
  }
  Structure A2 = R;
  for (int d = 0; d < dp.n; ++d)
    for (int e = 0; e < dp.n; ++e) {
      if (d == e) continue;
      set_two_type(A2, S, dmap[d], dmap[e], two_type_of(dp, S, d, e));
    }
  for (const auto& [c, e] : dp.const_map) A2.const_map[c] = dmap[e];
  Signature dsig = delta.signature();
  for (const auto& p : dsig.unary)
    if (!A2.unary.count(p)) {
      auto& tab = A2.unary[p];
      tab.assign(A2.n, 0);
      for (int d = 0; d < dp.n; ++d) tab[dmap[d]] = dp.unary.at(p)[d];
    }
  for (const auto& r : dsig.binary)
    if (!A2.binary.count(r)) {
      auto& tab = A2.binary[r];
      tab.assign((size_t)A2.n * A2.n, 0);
      for (int d = 0; d < dp.n; ++d)
        for (int e = 0; e < dp.n; ++e)
          tab[(size_t)dmap[d] * A2.n + dmap[e]] = dp.binary.at(r)[(size_t)d * dp.n + e];
    }
  return A2;
}

// ---------------------------------------------------------------------------
// decide()
// ---------------------------------------------------------------------------

namespace {

struct Flags {
  bool capped = false;
  std::string why;

  void set(const std::string& w) {
    if (!capped) why = w;
    capped = true;
  }
};

// Canonical restricted-growth strings of length n over at most maxv values.
void rgs_enumerate(int n, long maxv, const std::function<void(const std::vector<int>&)>& cb) {
  std::vector<int> a(n, 0);
  std::function<void(int, int)> go = [&](int i, int used) {
    if (i == n) {
      cb(a);
      return;
    }
    int cap = (int)std::min((long)used, maxv - 1);
    for (int v = 0; v <= cap; ++v) {
      a[i] = v;
      go(i + 1, std::max(used, v + 1));
    }
  };
  if (n == 0) {
    cb(a);
    return;
  }
  go(0, 0);
}

struct RouteD {
  const NormalTheoryC2& t;
  const Dataset& delta;
  const SignatureStar& S;
  bool finite_mode;
  const RunConfig& cfg;
  Flags& flags;

  std::optional<SatCertificate> found;
  std::vector<StarType> obs_pool, rest_pool;
  std::map<TypePair, std::optional<TwoType>> theta_memo;

  RouteD(const NormalTheoryC2& t_, const Dataset& d_, const SignatureStar& s_,
         bool fin, const RunConfig& c_, Flags& f_)
      : t(t_), delta(d_), S(s_), finite_mode(fin), cfg(c_), flags(f_) {}

  std::optional<TwoType> silent_theta(const OneType& p1, const OneType& p2) {
    TypePair pr = norm_pair(p1, p2);
    auto it = theta_memo.find(pr);
    if (it != theta_memo.end()) return it->second;
    std::optional<TwoType> best;
    uint64_t crossmax = 1ULL << (2 * S.b());
    for (uint64_t cr = 0; cr < crossmax; ++cr) {
      TwoType tau;
      tau.tx = pr.first;
      tau.ty = pr.second;
      tau.cross = cr;
      if (!is_silent(S, tau)) continue;
      if (!eval_under_two_type(S, t.alpha, tau)) continue;
      if (!eval_under_two_type(S, t.alpha, invert(tau))) continue;
      best = tau;
      break;  // canonical order: first hit is least
    }
    theta_memo[pr] = best;
    return best;
  }

  // Frame over the given stars with the maximal quiet set.
  Frame make_frame(std::vector<StarType> obs, std::vector<StarType> rest) {
    std::sort(obs.begin(), obs.end());
    std::sort(rest.begin(), rest.end());
    Frame F;
    F.stars = obs;
    F.stars.insert(F.stars.end(), rest.begin(), rest.end());
    F.n_observable = (int)obs.size();
    std::set<OneType> types;
    for (const auto& st : F.stars) types.insert(st.pi);
    for (auto i = types.begin(); i != types.end(); ++i)
      for (auto j = i; j != types.end(); ++j) {
        auto th = silent_theta(*i, *j);
        if (th) {
          TypePair pr = norm_pair(*i, *j);
          F.quiet.insert(pr);
          F.theta[pr] = *th;
        }
      }
    return F;
  }

  bool try_frame(const Frame& F, const Structure& dpx,
                 const std::vector<int>& delta_star) {
    if (!frame_models(F, t, S)) return false;
    std::vector<long> tall(F.n_observable, 0);
    for (int k : delta_star) tall[k] += 1;
    auto sys = assemble_constraints(F, S);
    sys.root =
        cs_and({sys.root, cs_atom(sum_lower_bound_atom(F.stars.size(), t.C + 1))});
    for (int k = 0; k < F.n_observable; ++k)
      sys.pinned.push_back({"w" + std::to_string(k), tall[k]});
    FeasResult fr;
    try {
      fr = feasible(sys, finite_mode ? FeasMode::Nat : FeasMode::ExtNat);
    } catch (const VariableLimitExceeded&) {
      flags.set("feasibility variable limit");
      return false;
    }
    if (!std::holds_alternative<Witness>(fr)) return false;
    const auto& w = std::get<Witness>(fr).values;

    SatCertificate cert;
    cert.finite_mode = finite_mode;
    cert.small_model_branch = false;
    cert.padding_override = cfg.padding_override;
    cert.dplus = dpx;
    cert.frame = F;
    cert.delta_star = delta_star;
    cert.delta_counts.assign(tall.begin(), tall.end());
    for (size_t k = 0; k < F.stars.size(); ++k)
      cert.solution.push_back(w.at("w" + std::to_string(k)));
    ExtAssignment a;
    for (size_t k = 0; k < F.stars.size(); ++k)
      a["w" + std::to_string(k)] = cert.solution[k];
    for (const auto* at : collect_atoms(sys.root))
      if (eval_extnat(*at, a)) cert.chosen_atoms.push_back(*at);
    if (!verify_certificate(cert, t, delta)) return false;
    found = cert;
    return true;
  }

  bool run() {
    bool pool_capped = false;
    auto pool = valid_star_pool(t, S, cfg.star_cap, &pool_capped);
    if (pool_capped) {
      flags.set("star pool cap");
      return false;
    }
    if (pool.empty()) return false;  // exhausted: no realizable star-type
    for (const auto& st : pool)
      (star_observable(S, st) ? obs_pool : rest_pool).push_back(st);

    bool dcapped = false;
    auto dlist = enumerate_dplus(delta, t, cfg.dplus_cap, &dcapped);
    if (dcapped) flags.set("data candidate cap");

    for (const auto& dp : dlist) {
      if (dp.n > cfg.padding_pattern_elems) {
        flags.set("padding pattern bound");
        continue;
      }
      long maxcol = S.color_bits >= 30 ? (1L << 30) : (1L << S.color_bits);
      bool hit = false;
      rgs_enumerate(dp.n, maxcol, [&](const std::vector<int>& colors) {
        if (hit) return;
        rgs_enumerate(dp.n, maxcol, [&](const std::vector<int>& tags) {
          if (hit) return;
          Structure dpx = dp;
          for (const auto& p : S.padding) dpx.unary[p].assign(dp.n, 0);
          dpx.unary[S.observable].assign(dp.n, 1);
          for (int d = 0; d < dp.n; ++d)
            for (int i = 0; i < S.color_bits; ++i) {
              dpx.unary[S.padding[i]][d] = (uint8_t)((colors[d] >> i) & 1);
              dpx.unary[S.padding[S.color_bits + i]][d] = (uint8_t)((tags[d] >> i) & 1);
            }
          if (probe(dpx)) hit = true;
        });
      });
      if (hit) return true;
    }
    return false;
  }

  bool probe(const Structure& dpx) {
    int D = dpx.n;
    std::vector<std::vector<int>> cands(D);  // indices into obs_pool
    int obs_idx = S.unary_index(S.observable);
    for (int d = 0; d < D; ++d) {
      OneType pid = one_type_of(dpx, S, d);
      std::map<TwoType, long> within;
      for (int e = 0; e < D; ++e) {
        if (e == d) continue;
        TwoType tau = two_type_of(dpx, S, d, e);
        if (is_message(S, tau)) within[tau]++;
      }
      for (size_t k = 0; k < obs_pool.size(); ++k) {
        const auto& st = obs_pool[k];
        if (!(st.pi == pid)) continue;
        bool ok = true;
        for (const auto& [mu, cnt] : within) {
          auto it = st.counts.find(mu);
          ExtNat have = it == st.counts.end() ? ExtNat(0) : it->second;
          if (!(have == ExtNat((unsigned long)cnt))) ok = false;
        }
        for (const auto& [mu, cnt] : st.counts) {
          bool mu_obs =
              ((tp1(mu).bits >> obs_idx) & 1) && ((tp2(mu).bits >> obs_idx) & 1);
          if (!mu_obs) continue;
          long want = within.count(mu) ? within.at(mu) : 0;
          if (!(cnt == ExtNat((unsigned long)want))) ok = false;
        }
        if (ok) cands[d].push_back((int)k);
      }
      if (cands[d].empty()) return false;
    }

    long prod = 1;
    for (int d = 0; d < D; ++d) {
      prod *= (long)cands[d].size();
      if (prod > cfg.delta_product_cap) {
        flags.set("delta assignment cap");
        return false;
      }
    }
    std::vector<int> pick(D, 0);
    std::function<bool(int)> go = [&](int d) -> bool {
      if (d == D) return try_delta(dpx, cands, pick);
      for (size_t i = 0; i < cands[d].size(); ++i) {
        pick[d] = (int)i;
        if (go(d + 1)) return true;
      }
      return false;
    };
    return go(0);
  }

  bool try_delta(const Structure& dpx, const std::vector<std::vector<int>>& cands,
                 const std::vector<int>& pick) {
    int D = dpx.n;
    std::set<int> req;
    for (int d = 0; d < D; ++d) req.insert(cands[d][pick[d]]);
    std::vector<StarType> base_obs;
    for (int k : req) base_obs.push_back(obs_pool[k]);

    std::vector<StarType> extras;
    for (size_t k = 0; k < obs_pool.size(); ++k)
      if (!req.count((int)k)) extras.push_back(obs_pool[k]);
    extras.insert(extras.end(), rest_pool.begin(), rest_pool.end());

    auto attempt_with = [&](const std::vector<StarType>& ext) {
      return attempt(dpx, base_obs, ext, cands, pick);
    };

    if ((long)extras.size() > cfg.pool_exhaust_cap) {
      flags.set("frame extension cap");
      if (attempt_with({})) return true;
      for (size_t i = 0; i < extras.size() && i < 64; ++i)
        if (attempt_with({extras[i]})) return true;
      return false;
    }
    for (uint64_t mask = 0; mask < (1ULL << extras.size()); ++mask) {
      std::vector<StarType> ext;
      for (size_t i = 0; i < extras.size(); ++i)
        if (mask & (1ULL << i)) ext.push_back(extras[i]);
      if (attempt_with(ext)) return true;
    }
    return false;
  }

  bool attempt(const Structure& dpx, const std::vector<StarType>& base_obs,
               const std::vector<StarType>& ext,
               const std::vector<std::vector<int>>& cands,
               const std::vector<int>& pick) {
    if (base_obs.empty() && ext.empty()) return false;  // frames are nonempty
    std::vector<StarType> obs = base_obs, rest;
    for (const auto& st : ext)
      (star_observable(S, st) ? obs : rest).push_back(st);
    Frame F = make_frame(obs, rest);
    std::map<StarType, int> idx;
    for (size_t k = 0; k < F.stars.size(); ++k) idx[F.stars[k]] = (int)k;
    std::vector<int> dstar;
    for (size_t d = 0; d < cands.size(); ++d)
      dstar.push_back(idx.at(obs_pool[cands[d][pick[d]]]));
    return try_frame(F, dpx, dstar);
  }
};

}  // namespace

Verdict decide(const NormalTheoryC2& t, const Dataset& delta, bool finite_mode,
               const RunConfig& cfg) {
  Flags flags;

  // (0) the small-model branch on the original sentence
  {
    auto r = small_model_check(t.original, delta, t.C, SearchBudget{cfg.node_budget});
    if (std::holds_alternative<Structure>(r)) {
      SatCertificate cert;
      cert.finite_mode = finite_mode;
      cert.small_model_branch = true;
      cert.small = std::get<Structure>(r);
      cert.padding_override = cfg.padding_override;
      Verdict v;
      v.kind = Verdict::Kind::Sat;
      v.cert = cert;
      v.detail = "small model";
      return v;
    }
    if (std::holds_alternative<BudgetExceeded>(r)) flags.set("small-model budget");
  }

  auto S = SignatureStar::make(t, cfg.padding_override);

  // (A) data-level refutation
  if (!delta.constants().empty()) {
    DataEncoding enc(delta, t);
    auto st = enc.solver.solve(cfg.solver_conflicts);
    if (st == CnfSolver::Status::Unsat && !flags.capped) {
      Verdict v;
      v.kind = Verdict::Kind::Unsat;
      v.detail = "no admissible data structure (step 1 exhausted)";
      return v;
    }
    if (st == CnfSolver::Status::Budget) flags.set("data refutation budget");
  }

  // (B) guided model search: all-distinct constants at sizes |K|..|K|+extra
  {
    Signature dsig = delta.signature();
    std::vector<std::string> consts(dsig.constants.begin(), dsig.constants.end());
    int k = (int)consts.size();
    int n0 = std::max((int)t.C + 1, std::max(k, 1));
    for (int n = n0; n <= n0 + cfg.guided_extra; ++n) {
      std::map<std::string, int> cmap;
      for (int i = 0; i < k; ++i) cmap[consts[i]] = i;
      auto r = find_model_at({t.phi_star()}, delta, n, cmap,
                             SearchBudget{cfg.solver_conflicts});
      if (std::holds_alternative<Structure>(r)) {
        auto cert = certificate_from_model(std::get<Structure>(r), t, delta, S,
                                           finite_mode, cfg.padding_override);
        if (verify_certificate(cert, t, delta)) {
          Verdict v;
          v.kind = Verdict::Kind::Sat;
          v.cert = cert;
          v.detail = "guided model at size " + std::to_string(n);
          return v;
        }
        flags.set("certificate assembly failed");
      }
      if (std::holds_alternative<BudgetExceeded>(r)) flags.set("guided search budget");
    }
  }

  // (C) merged small search
  {
    Signature dsig = delta.signature();
    if ((int)dsig.constants.size() <= cfg.merge_cap) {
      auto r = find_model({t.phi_star()}, delta, (int)t.C + 1, cfg.small_search_max,
                          SearchBudget{cfg.node_budget});
      if (std::holds_alternative<Structure>(r)) {
        auto cert = certificate_from_model(std::get<Structure>(r), t, delta, S,
                                           finite_mode, cfg.padding_override);
        if (verify_certificate(cert, t, delta)) {
          Verdict v;
          v.kind = Verdict::Kind::Sat;
          v.cert = cert;
          v.detail = "merged model search";
          return v;
        }
        flags.set("certificate assembly failed");
      }
      if (std::holds_alternative<BudgetExceeded>(r)) flags.set("merged search budget");
    }
  }

  // (D) the pool-based procedure
  {
    RouteD rd(t, delta, S, finite_mode, cfg, flags);
    bool sat = rd.run();
    if (sat && rd.found) {
      Verdict v;
      v.kind = Verdict::Kind::Sat;
      v.cert = rd.found;
      v.detail = "frame search";
      return v;
    }
  }

  Verdict v;
  if (!flags.capped) {
    v.kind = Verdict::Kind::Unsat;
    v.detail = "all branches exhausted";
  } else {
    v.kind = Verdict::Kind::Inconclusive;
    v.detail = flags.why;
  }
  return v;
}

}  // namespace c2data
