#include "c2data/frames.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

namespace c2data {

bool Frame::chromatic(const SignatureStar& s) const {
  for (const auto& st : stars)
    if (!star_chromatic(s, st)) return false;
  return true;
}

bool Frame::bounded(long D) const {
  for (const auto& st : stars)
    if (!star_bounded(st, D)) return false;
  return true;
}

bool Frame::well_formed(const SignatureStar& s) const {
  if (stars.empty()) return false;
  for (size_t i = 0; i < stars.size(); ++i) {
    if (!star_invariant_ok(s, stars[i])) return false;
    for (size_t j = i + 1; j < stars.size(); ++j)
      if (stars[i] == stars[j]) return false;
  }
  for (size_t i = 0; i < stars.size(); ++i) {
    bool obs = star_observable(s, stars[i]);
    if (obs != (i < (size_t)n_observable)) return false;
  }
  for (const auto& [pr, tau] : theta) {
    if (!quiet.count(pr)) return false;
    if (!is_silent(s, tau)) return false;
    if (!(tp1(tau) == pr.first && tp2(tau) == pr.second)) return false;
  }
  for (const auto& pr : quiet)
    if (!theta.count(pr)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

std::pair<Frame, Histogram> extract_frame(const Structure& A, const SignatureStar& s) {
  Frame F;
  std::map<StarType, long> pop;
  std::vector<StarType> st_of(A.n);
  for (int a = 0; a < A.n; ++a) {
    st_of[a] = star_of(A, a, s);
    pop[st_of[a]]++;
  }
  std::vector<StarType> obs, rest;
  for (const auto& [st, n] : pop)
    (star_observable(s, st) ? obs : rest).push_back(st);
  F.stars = obs;
  F.n_observable = (int)obs.size();
  F.stars.insert(F.stars.end(), rest.begin(), rest.end());

  for (int a = 0; a < A.n; ++a)
    for (int b = 0; b < A.n; ++b) {
      if (a == b) continue;
      TwoType t = two_type_of(A, s, a, b);
      if (!is_silent(s, t)) continue;
      TypePair pr = norm_pair(t.tx, t.ty);
      F.quiet.insert(pr);
      TwoType oriented = t.tx == pr.first ? t : invert(t);
      auto it = F.theta.find(pr);
      if (it == F.theta.end() || oriented < it->second) F.theta[pr] = oriented;
    }

  Histogram H;
  for (const auto& st : F.stars) H.w.push_back(ExtNat((unsigned long)pop[st]));
  return {F, H};
}

bool frame_describes(const Frame& F, const Structure& A, const SignatureStar& s) {
  // clause 1: stars = all and only realized star-types
  std::set<StarType> realized;
  for (int a = 0; a < A.n; ++a) realized.insert(star_of(A, a, s));
  std::set<StarType> listed(F.stars.begin(), F.stars.end());
  if (realized != listed) return false;
  // clause 2 plus collection of the realized quiet pairs
  std::set<TypePair> realized_quiet;
  std::set<TypePair> theta_realized;
  for (int a = 0; a < A.n; ++a)
    for (int b = 0; b < A.n; ++b) {
      if (a == b) continue;
      TwoType t = two_type_of(A, s, a, b);
      if (!is_silent(s, t)) continue;
      TypePair pr = norm_pair(t.tx, t.ty);
      realized_quiet.insert(pr);
      if (!F.quiet.count(pr)) return false;
      auto it = F.theta.find(pr);
      if (it == F.theta.end()) return false;
      if (t == it->second) theta_realized.insert(pr);
    }
  // clause 3: the chosen silent type is realized for every realized quiet pair
  for (const auto& pr : realized_quiet)
    if (!theta_realized.count(pr)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// F |= phi*
// ---------------------------------------------------------------------------

static bool type_passes_alpha(const NormalTheoryC2& t, const SignatureStar& s,
                              const TwoType& tau) {
  return eval_under_two_type(s, t.alpha, tau) &&
         eval_under_two_type(s, t.alpha, invert(tau));
}

bool frame_models(const Frame& F, const NormalTheoryC2& t, const SignatureStar& s) {
  for (const auto& st : F.stars) {
    for (const auto& [mu, n] : st.counts) {
      if (n > ExtNat(0) && !type_passes_alpha(t, s, mu)) return false;
    }
    // clause 3: per counting predicate the sent messages sum to C_h
    for (size_t h = 0; h < s.counting_preds.size(); ++h) {
      int bi = s.binary_index(s.counting_preds[h]);
      ExtNat sum(0);
      for (const auto& [mu, n] : st.counts)
        if (mu.fwd(bi)) sum = sum + n;
      if (!(sum == ExtNat((unsigned long)s.counting_bounds[h]))) return false;
    }
  }
  for (const auto& [pr, tau] : F.theta)
    if (!type_passes_alpha(t, s, tau)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Coefficients, constraint assembly, solution checking
// ---------------------------------------------------------------------------

namespace {

struct FrameIndex {
  std::vector<OneType> types;  // realized 1-types plus message-target types
  std::map<OneType, int> index;

  explicit FrameIndex(const Frame& F) {
    std::set<OneType> set;
    for (const auto& st : F.stars) {
      set.insert(st.pi);
      for (const auto& [mu, n] : st.counts) set.insert(tp2(mu));
    }
    types.assign(set.begin(), set.end());
    for (size_t i = 0; i < types.size(); ++i) index[types[i]] = (int)i;
  }
};

struct Coefs {
  // indexed [i][k]
  std::vector<std::vector<int>> o, p;
  std::vector<std::vector<long>> r, s;

  Coefs(const Frame& F, const FrameIndex& ix, const SignatureStar& sig) {
    size_t L = ix.types.size(), N = F.stars.size();
    o.assign(L, std::vector<int>(N, 0));
    p.assign(L, std::vector<int>(N, 1));
    r.assign(L, std::vector<long>(N, 0));
    s.assign(L, std::vector<long>(N, 0));
    for (size_t k = 0; k < N; ++k) {
      const auto& st = F.stars[k];
      o[ix.index.at(st.pi)][k] = 1;
      for (const auto& [mu, n] : st.counts) {
        int i = ix.index.at(tp2(mu));
        long cnt = (long)n.value();  // counts in frames are finite
        p[i][k] = 0;
        s[i][k] += cnt;
        if (classify(sig, mu) == TwoTypeClass::NonInvertibleMessage) r[i][k] += cnt;
      }
    }
  }
};

std::string wname(size_t k) { return "w" + std::to_string(k); }

}  // namespace

ConstraintSystem assemble_constraints(const Frame& F, const SignatureStar& sig) {
  FrameIndex ix(F);
  Coefs co(F, ix, sig);
  size_t L = ix.types.size(), N = F.stars.size();

  auto u_expr = [&](size_t i) {
    LinearExpr e;
    for (size_t k = 0; k < N; ++k)
      if (co.o[i][k]) e.add(wname(k), 1);
    return e;
  };
  auto x_expr = [&](size_t i, size_t i2) {  // x_{i,i2}
    LinearExpr e;
    for (size_t k = 0; k < N; ++k)
      if (co.o[i][k] && co.p[i2][k]) e.add(wname(k), 1);
    return e;
  };

  std::vector<CSPtr> parts;

  // C1: v_j = v_{j'} for inverse pairs of invertible message types.
  {
    std::map<TwoType, LinearExpr> v;
    for (size_t k = 0; k < N; ++k)
      for (const auto& [mu, n] : F.stars[k].counts)
        if (classify(sig, mu) == TwoTypeClass::InvertibleMessage) {
          v[mu].add(wname(k), (long)n.value());
          v[invert(mu)];  // ensure the inverse exists (possibly zero)
        }
    std::set<TwoType> done;
    for (const auto& [mu, e] : v) {
      if (done.count(mu)) continue;
      TwoType inv = invert(mu);
      done.insert(mu);
      done.insert(inv);
      LinearExpr e2 = v.count(inv) ? v.at(inv) : LinearExpr();
      parts.push_back(cs_atom(LinearAtom{e, e2, Rel::Eq}));
    }
  }

  // C2: s_ik <= u_i
  for (size_t i = 0; i < L; ++i)
    for (size_t k = 0; k < N; ++k)
      if (co.s[i][k] > 0)
        parts.push_back(cs_atom(LinearAtom{LinearExpr(co.s[i][k]), u_expr(i), Rel::Le}));

  // C3: u_i <= 1 or u_i > Z
  for (size_t i = 0; i < L; ++i) {
    parts.push_back(
        cs_or({cs_atom(LinearAtom{u_expr(i), LinearExpr(1), Rel::Le}),
               cs_atom(LinearAtom{u_expr(i), LinearExpr(sig.Z), Rel::Gt})}));
  }

  // C4: o_ik = 1 -> (u_i > 1 or r_{i'k} <= x_{i'i})
  for (size_t i = 0; i < L; ++i)
    for (size_t k = 0; k < N; ++k) {
      if (!co.o[i][k]) continue;
      for (size_t i2 = 0; i2 < L; ++i2) {
        if (co.r[i2][k] == 0) continue;  // trivially satisfied
        parts.push_back(
            cs_or({cs_atom(LinearAtom{u_expr(i), LinearExpr(1), Rel::Gt}),
                   cs_atom(LinearAtom{LinearExpr(co.r[i2][k]), x_expr(i2, i), Rel::Le})}));
      }
    }

  // C5: {i,i'} not in I -> u_i <= 1 or u_{i'} <= 1
  for (size_t i = 0; i < L; ++i)
    for (size_t i2 = i; i2 < L; ++i2) {
      if (F.quiet.count(norm_pair(ix.types[i], ix.types[i2]))) continue;
      parts.push_back(cs_or({cs_atom(LinearAtom{u_expr(i), LinearExpr(1), Rel::Le}),
                             cs_atom(LinearAtom{u_expr(i2), LinearExpr(1), Rel::Le})}));
    }

  // C6: {i,i'} not in I and o_ik = 1 -> r_{i'k} >= x_{i'i} - self
  // (self: the element itself is counted in x_{i'i} when i' = i and star k
  // sends nothing to type i, but it cannot be its own message target)
  for (size_t i = 0; i < L; ++i)
    for (size_t k = 0; k < N; ++k) {
      if (!co.o[i][k]) continue;
      for (size_t i2 = 0; i2 < L; ++i2) {
        if (F.quiet.count(norm_pair(ix.types[i], ix.types[i2]))) continue;
        long self = (i2 == i && co.p[i][k]) ? 1 : 0;
        parts.push_back(cs_atom(
            LinearAtom{LinearExpr(co.r[i2][k] + self), x_expr(i2, i), Rel::Ge}));
      }
    }

  ConstraintSystem sys;
  sys.root = cs_and(parts);
  return sys;
}

bool check_solution(const Frame& F, const std::vector<ExtNat>& w,
                    const SignatureStar& sig) {
  if (w.size() != F.stars.size()) return false;
  FrameIndex ix(F);
  Coefs co(F, ix, sig);
  size_t L = ix.types.size(), N = F.stars.size();

  auto u = [&](size_t i) {
    ExtNat acc(0);
    for (size_t k = 0; k < N; ++k)
      if (co.o[i][k]) acc = acc + w[k];
    return acc;
  };
  auto x = [&](size_t i, size_t i2) {
    ExtNat acc(0);
    for (size_t k = 0; k < N; ++k)
      if (co.o[i][k] && co.p[i2][k]) acc = acc + w[k];
    return acc;
  };

  // C1
  {
    std::map<TwoType, ExtNat> v;
    for (size_t k = 0; k < N; ++k)
      for (const auto& [mu, n] : F.stars[k].counts)
        if (classify(sig, mu) == TwoTypeClass::InvertibleMessage) {
          auto& acc = v[mu];
          acc = acc + n * w[k];
          if (!v.count(invert(mu))) v[invert(mu)] = ExtNat(0);
        }
    for (const auto& [mu, val] : v) {
      ExtNat other = v.count(invert(mu)) ? v.at(invert(mu)) : ExtNat(0);
      if (!(val == other)) return false;
    }
  }
  // C2
  for (size_t i = 0; i < L; ++i)
    for (size_t k = 0; k < N; ++k)
      if (!(ExtNat((unsigned long)co.s[i][k]) <= u(i))) return false;
  // C3
  for (size_t i = 0; i < L; ++i) {
    ExtNat ui = u(i);
    if (!(ui <= ExtNat(1) || ui > ExtNat((unsigned long)sig.Z))) return false;
  }
  // C4
  for (size_t i = 0; i < L; ++i)
    for (size_t k = 0; k < N; ++k) {
      if (!co.o[i][k]) continue;
      for (size_t i2 = 0; i2 < L; ++i2) {
        if (u(i) > ExtNat(1)) continue;
        if (!(ExtNat((unsigned long)co.r[i2][k]) <= x(i2, i))) return false;
      }
    }
  // C5
  for (size_t i = 0; i < L; ++i)
    for (size_t i2 = i; i2 < L; ++i2) {
      if (F.quiet.count(norm_pair(ix.types[i], ix.types[i2]))) continue;
      if (!(u(i) <= ExtNat(1) || u(i2) <= ExtNat(1))) return false;
    }
  // C6 (with the self-exclusion at i' = i)
  for (size_t i = 0; i < L; ++i)
    for (size_t k = 0; k < N; ++k) {
      if (!co.o[i][k]) continue;
      for (size_t i2 = 0; i2 < L; ++i2) {
        if (F.quiet.count(norm_pair(ix.types[i], ix.types[i2]))) continue;
        long self = (i2 == i && co.p[i][k]) ? 1 : 0;
        if (!(ExtNat((unsigned long)(co.r[i2][k] + self)) >= x(i2, i))) return false;
      }
    }
  return true;
}

// ---------------------------------------------------------------------------
// Realization by backtracking 2-type assignment
// ---------------------------------------------------------------------------

RealizeResult realize_frame(const Frame& F, const std::vector<ExtNat>& w,
                            const NormalTheoryC2& t, const SignatureStar& sig,
                            long cap, long node_budget) {
  if (w.size() != F.stars.size()) throw PreconditionViolated("histogram arity");
  long total = 0;
  for (const auto& v : w) {
    if (v.is_inf()) throw PreconditionViolated("infinite histogram entry");
    total += (long)v.value();
  }
  if (total > cap) throw PreconditionViolated("sum of histogram exceeds cap");
  if (total == 0) throw PreconditionViolated("empty structure");
  if (!frame_models(F, t, sig)) throw PreconditionViolated("frame does not model phi*");
  if (!check_solution(F, w, sig)) throw PreconditionViolated("not a solution");

  // elements, star index per element
  std::vector<int> star_of_elem;
  for (size_t k = 0; k < F.stars.size(); ++k)
    for (unsigned long c = 0; c < w[k].value(); ++c) star_of_elem.push_back((int)k);
  int n = (int)star_of_elem.size();

  Structure A;
  A.n = n;
  for (const auto& p : sig.unary_order) A.unary[p] = std::vector<uint8_t>(n, 0);
  for (const auto& r : sig.binary_order)
    A.binary[r] = std::vector<uint8_t>((size_t)n * n, 0);
  for (int a = 0; a < n; ++a) {
    const OneType& pi = F.stars[star_of_elem[a]].pi;
    for (int i = 0; i < sig.u(); ++i)
      A.unary[sig.unary_order[i]][a] = (uint8_t)((pi.bits >> i) & 1);
    for (int i = 0; i < sig.b(); ++i)
      A.binary[sig.binary_order[i]][(size_t)a * n + a] =
          (uint8_t)((pi.bits >> (sig.u() + i)) & 1);
  }

  // remaining out-quota per element per message type
  std::vector<std::map<TwoType, long>> quota(n);
  for (int a = 0; a < n; ++a)
    for (const auto& [mu, c] : F.stars[star_of_elem[a]].counts)
      quota[a][mu] = (long)c.value();

  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) pairs.push_back({a, b});

  // capacity pruning: each remaining pair can discharge at most one unit of an
  // element's outstanding quota
  std::vector<int> pairs_left(n, n - 1);
  std::vector<long> quota_sum(n, 0);
  for (int a = 0; a < n; ++a)
    for (const auto& [mu, q] : quota[a]) quota_sum[a] += q;

  long nodes = 0;
  bool budget_hit = false;

  std::function<bool(size_t)> go = [&](size_t pi) -> bool {
    if (++nodes > node_budget) {
      budget_hit = true;
      return false;
    }
    if (pi == pairs.size()) {
      for (int a = 0; a < n; ++a)
        if (quota_sum[a] != 0) return false;
      return true;
    }
    auto [a, b] = pairs[pi];
    OneType pa = F.stars[star_of_elem[a]].pi;
    OneType pb = F.stars[star_of_elem[b]].pi;

    std::vector<TwoType> cands;
    TypePair pr = norm_pair(pa, pb);
    auto th = F.theta.find(pr);
    if (th != F.theta.end()) {
      TwoType tau = tp1(th->second) == pa && tp2(th->second) == pb ? th->second
                                                                   : invert(th->second);
      if (tp1(tau) == pa && tp2(tau) == pb) cands.push_back(tau);
      if (pa == pb) cands.push_back(invert(th->second));
    }
    for (const auto& [mu, q] : quota[a]) {
      if (q <= 0) continue;
      if (!(tp2(mu) == pb)) continue;
      TwoType inv = invert(mu);
      if (is_message(sig, inv)) {
        auto it = quota[b].find(inv);
        if (it == quota[b].end() || it->second <= 0) continue;
      }
      cands.push_back(mu);
    }
    for (const auto& [mu, q] : quota[b]) {
      if (q <= 0) continue;
      if (!(tp2(mu) == pa)) continue;
      if (is_message(sig, invert(mu))) continue;  // invertible handled from a's side
      cands.push_back(invert(mu));                // orient as (a,b)
    }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    for (const auto& tau : cands) {
      bool amsg = is_message(sig, tau);
      bool bmsg = is_message(sig, invert(tau));
      if (amsg) {
        quota[a][tau]--;
        quota_sum[a]--;
      }
      if (bmsg) {
        quota[b][invert(tau)]--;
        quota_sum[b]--;
      }
      pairs_left[a]--;
      pairs_left[b]--;
      set_two_type(A, sig, a, b, tau);
      bool ok = quota_sum[a] <= pairs_left[a] && quota_sum[b] <= pairs_left[b];
      if (ok && go(pi + 1)) return true;
      pairs_left[a]++;
      pairs_left[b]++;
      if (amsg) {
        quota[a][tau]++;
        quota_sum[a]++;
      }
      if (bmsg) {
        quota[b][invert(tau)]++;
        quota_sum[b]++;
      }
      set_two_type(A, sig, a, b, vacuous_product(pa, pb));
      if (budget_hit) return false;
    }
    return false;
  };

  if (!go(0)) {
    if (budget_hit) return ResourceExceeded{nodes};
    // The contract guarantees existence; an exhausted search at this scale
    // means the caller's inputs were outside the contract.
    return ResourceExceeded{nodes};
  }

  // self-checks against the positively-populated sub-frame
  Frame Fpos;
  Fpos.n_observable = 0;
  for (size_t k = 0; k < F.stars.size(); ++k) {
    if (w[k].value() == 0) continue;
    Fpos.stars.push_back(F.stars[k]);
    if (star_observable(sig, F.stars[k])) Fpos.n_observable++;
  }
  Fpos.quiet = F.quiet;
  Fpos.theta = F.theta;
  if (!evaluate(A, t.phi_star()))
    throw std::logic_error("realize_frame: result does not model phi*");
  if (!frame_describes(Fpos, A, sig))
    throw std::logic_error("realize_frame: frame does not describe the result");
  return A;
}

}  // namespace c2data
