#include "c2data/surgery.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <queue>
#include <sstream>

namespace c2data {

Structure disjoint_copies(const Structure& A, int k) {
  assert(k >= 1);
  Structure B;
  B.n = A.n * k;
  for (const auto& [p, tab] : A.unary) {
    auto& t = B.unary[p];
    t.assign(B.n, 0);
    for (int c = 0; c < k; ++c)
      for (int a = 0; a < A.n; ++a) t[c * A.n + a] = tab[a];
  }
  for (const auto& [r, tab] : A.binary) {
    auto& t = B.binary[r];
    t.assign((size_t)B.n * B.n, 0);
    for (int c = 0; c < k; ++c)
      for (int a = 0; a < A.n; ++a)
        for (int b = 0; b < A.n; ++b)
          t[(size_t)(c * A.n + a) * B.n + (c * A.n + b)] = tab[(size_t)a * A.n + b];
  }
  B.const_map = A.const_map;  // constants live in copy 0
  return B;
}

Structure silent_to_vacuous(const Structure& A, const SignatureStar& s,
                            const std::set<int>& spare) {
  Structure B = A;
  for (int a = 0; a < A.n; ++a)
    for (int b = a + 1; b < A.n; ++b) {
      if (spare.count(a) && spare.count(b)) continue;
      TwoType t = two_type_of(A, s, a, b);
      if (is_silent(s, t) && !is_vacuous(t))
        set_two_type(B, s, a, b, vacuous_product(t.tx, t.ty));
    }
  return B;
}

std::pair<int, int> find_silent_pair(const Structure& A, const std::vector<int>& B,
                                     const std::vector<int>& Bp, long mC,
                                     const SignatureStar& s) {
  if ((long)B.size() < mC * mC + mC + 1)
    throw PreconditionViolated("find_silent_pair: B too small");
  if ((long)Bp.size() < mC + 1)
    throw PreconditionViolated("find_silent_pair: B' too small");
  for (int b : B)
    for (int bp : Bp)
      if (b == bp) throw PreconditionViolated("find_silent_pair: sets intersect");

  // B'_0: the first mC+1 elements of B'
  std::vector<int> B0(Bp.begin(), Bp.begin() + (size_t)(mC + 1));
  // exclude elements of B receiving a message from B'_0
  std::set<int> excluded;
  for (int bp : B0)
    for (int b : B) {
      TwoType t = two_type_of(A, s, bp, b);
      if (is_message(s, t)) excluded.insert(b);
    }
  int chosen_b = -1;
  for (int b : B)
    if (!excluded.count(b)) {
      chosen_b = b;
      break;
    }
  if (chosen_b < 0) throw WitnessNotFound("no unmessaged element in B");
  for (int bp : B0) {
    TwoType t = two_type_of(A, s, chosen_b, bp);
    if (!is_message(s, t)) {
      // neither direction is a message: bp was not sending to chosen_b either
      if (is_silent(s, t)) return {chosen_b, bp};
    }
  }
  throw WitnessNotFound("no silent partner in B'_0");
}

// ---------------------------------------------------------------------------
// t-cycle detection
// ---------------------------------------------------------------------------

namespace {

struct CycleGraph {
  int n;
  std::vector<std::vector<uint8_t>> edge;    // non-vacuous or both-в-O
  std::vector<std::vector<uint8_t>> strong;  // both-in-O or invertible message

  CycleGraph(const Structure& A, const std::set<int>& O, const SignatureStar& s)
      : n(A.n),
        edge(A.n, std::vector<uint8_t>(A.n, 0)),
        strong(A.n, std::vector<uint8_t>(A.n, 0)) {
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        TwoType t = two_type_of(A, s, a, b);
        bool bothO = O.count(a) && O.count(b);
        bool e = bothO || !is_vacuous(t);
        bool st = bothO || classify(s, t) == TwoTypeClass::InvertibleMessage;
        edge[a][b] = edge[b][a] = e ? 1 : 0;
        strong[a][b] = strong[b][a] = st ? 1 : 0;
      }
  }
};

}  // namespace

std::vector<TCycle> find_tcycles(const Structure& A, const std::set<int>& O,
                                 int max_len, bool strong_only,
                                 const SignatureStar& s, long budget) {
  CycleGraph g(A, O, s);
  std::vector<TCycle> out;
  long nodes = 0;
  // canonical cycles: start at the least element, second < last (reflection),
  // all other elements > start (rotation)
  std::vector<int> path;
  std::vector<uint8_t> used(A.n, 0);
  std::function<void(int)> dfs = [&](int start) {
    int cur = path.back();
    if (++nodes > budget) throw CapExceeded(nodes);
    if ((int)path.size() >= 3 && g.edge[cur][start]) {
      if (path[1] < path.back()) {  // reflection canonicalization
        bool outside = false;
        for (int v : path)
          if (!O.count(v)) outside = true;
        if (outside) {
          bool st = true;
          for (size_t i = 0; i < path.size(); ++i) {
            int a = path[i], b = path[(i + 1) % path.size()];
            if (!g.strong[a][b]) st = false;
          }
          if (!strong_only || st) {
            TCycle c;
            c.elems = path;
            c.strong = st;
            out.push_back(c);
          }
        }
      }
    }
    if ((int)path.size() >= max_len) return;
    for (int nxt = start + 1; nxt < A.n; ++nxt) {
      if (used[nxt] || !g.edge[cur][nxt]) continue;
      if (strong_only && !g.strong[cur][nxt]) continue;
      used[nxt] = 1;
      path.push_back(nxt);
      dfs(start);
      path.pop_back();
      used[nxt] = 0;
    }
  };
  for (int start = 0; start < A.n; ++start) {
    path = {start};
    std::fill(used.begin(), used.end(), 0);
    used[start] = 1;
    dfs(start);
  }
  // order: by length, then lexicographic element sequence
  std::sort(out.begin(), out.end(), [](const TCycle& a, const TCycle& b) {
    if (a.elems.size() != b.elems.size()) return a.elems.size() < b.elems.size();
    return a.elems < b.elems;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Strong t-cycle destruction
// ---------------------------------------------------------------------------

long surgery_copy_bound(long mC, int omega, size_t observables) {
  long geo = 0, pw = 1;
  for (int i = 0; i < omega; ++i) {
    geo += pw;
    pw *= std::max(mC, 1L);
    if (mC <= 1) pw = 1;
  }
  return 2 * ((long)observables + 1) * geo + 2;
}

namespace {

// directed accessibility: self, message sent (a -> b when tp[a,b] is a
// message), or both endpoints in O
std::vector<uint8_t> accessible_from(const Structure& A, const std::set<int>& O,
                                     const SignatureStar& s, std::vector<int> seeds,
                                     int steps) {
  std::vector<uint8_t> acc(A.n, 0);
  std::vector<int> frontier = seeds;
  for (int x : seeds) acc[x] = 1;
  for (int l = 0; l < steps; ++l) {
    std::vector<int> next;
    for (int a : frontier)
      for (int b = 0; b < A.n; ++b) {
        if (acc[b] || a == b) continue;
        bool direct = (O.count(a) && O.count(b)) ||
                      is_message(s, two_type_of(A, s, a, b));
        if (direct) {
          acc[b] = 1;
          next.push_back(b);
        }
      }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return acc;
}

}  // namespace

Structure break_strong_tcycle(const Structure& A, const std::set<int>& O,
                              const TCycle& cycle, int omega,
                              const NormalTheoryC2& t, const SignatureStar& s) {
  if (!cycle.strong) throw PreconditionViolated("cycle is not strong");
  if ((int)cycle.elems.size() >= omega)
    throw PreconditionViolated("cycle is not short");
  // rotate so the head lies outside O
  std::vector<int> cyc = cycle.elems;
  {
    size_t off = 0;
    while (off < cyc.size() && O.count(cyc[off])) ++off;
    if (off == cyc.size()) throw PreconditionViolated("cycle entirely inside O");
    std::rotate(cyc.begin(), cyc.begin() + off, cyc.end());
  }
  int a = cyc[0], b = cyc[1];
  TwoType mu = two_type_of(A, s, a, b);
  if (classify(s, mu) != TwoTypeClass::InvertibleMessage)
    throw PreconditionViolated("head edge is not an invertible message");

  long m = (long)s.counting_preds.size();
  long mC = m * t.C;

  auto acc2 = accessible_from(A, O, s, {a, b}, omega - 2);
  auto acc1 = accessible_from(A, O, s, {a, b}, omega - 1);

  // c: outside O, not accessible in omega-1 steps, sends mu to some d also
  // outside O and not accessible in omega-2 steps
  int c = -1, d = -1;
  for (int cc = 0; cc < A.n && c < 0; ++cc) {
    if (O.count(cc) || acc1[cc]) continue;
    for (int dd = 0; dd < A.n; ++dd) {
      if (dd == cc || O.count(dd) || acc2[dd]) continue;
      if (two_type_of(A, s, cc, dd) == mu) {
        c = cc;
        d = dd;
        break;
      }
    }
  }
  if (c < 0) throw WitnessNotFound("no remote copy of the head edge");

  // e, f: same 1-types as a and b, silent pair, d sends no message to e
  OneType ta = one_type_of(A, s, a), tb = one_type_of(A, s, b);
  std::vector<int> E, F;
  for (int x = 0; x < A.n; ++x) {
    if (O.count(x) || x == a || x == b || x == c || x == d) continue;
    if (one_type_of(A, s, x) == ta) E.push_back(x);
    if (one_type_of(A, s, x) == tb) F.push_back(x);
  }
  long mCe = std::max(mC, 1L);
  long need_e = mCe * mCe + mCe + 1, need_f = mCe + 1;
  bool same_type = ta == tb;  // E and F draw from one pool: keep slices disjoint
  int e = -1, f = -1;
  size_t ei = 0, fi = 0;
  for (long i = 0; i <= mCe && e < 0; ++i) {
    if (same_type) fi = ei + (size_t)need_e;
    if ((long)E.size() < (long)ei + need_e || (long)F.size() < (long)fi + need_f)
      throw WitnessNotFound("not enough same-type elements for the silent pair");
    std::vector<int> Ei(E.begin() + ei, E.begin() + ei + need_e);
    std::vector<int> Fi(F.begin() + fi, F.begin() + fi + need_f);
    ei = same_type ? fi + (size_t)need_f : ei + (size_t)need_e;
    if (!same_type) fi += (size_t)need_f;
    auto [be, bf] = find_silent_pair(A, Ei, Fi, mCe, s);
    if (!is_message(s, two_type_of(A, s, d, be))) {
      e = be;
      f = bf;
    }
  }
  if (e < 0) throw WitnessNotFound("d messages every candidate witness");

  // stage 1: make tp[a,d] silent
  Structure A1 = A;
  TwoType t_ad = two_type_of(A, s, a, d);
  TwoType t_ef = two_type_of(A, s, e, f);
  TwoType t_ed = two_type_of(A, s, e, d);
  set_two_type(A1, s, a, d, t_ef);
  set_two_type(A1, s, e, d, t_ad);
  set_two_type(A1, s, e, f, t_ed);

  // stage 2: swap the head edge away
  Structure A2 = A1;
  TwoType u_ab = two_type_of(A1, s, a, b);
  TwoType u_ad = two_type_of(A1, s, a, d);
  TwoType u_cb = two_type_of(A1, s, c, b);
  TwoType u_cd = two_type_of(A1, s, c, d);
  set_two_type(A2, s, a, b, u_ad);
  set_two_type(A2, s, a, d, u_ab);
  set_two_type(A2, s, c, b, u_cd);
  set_two_type(A2, s, c, d, u_cb);
  return A2;
}

Structure eliminate_strong_tcycles(const Structure& A0, const std::set<int>& O,
                                   int omega, const NormalTheoryC2& t,
                                   const SignatureStar& s, SurgeryConfig cfg,
                                   SurgeryLog* log) {
  long m = (long)s.counting_preds.size();
  long mC = m * t.C;
  long K = surgery_copy_bound(mC, std::max(omega, 4), O.size());
  Structure A = disjoint_copies(A0, (int)K + 1);

  auto metric = [&](const Structure& X) {
    std::vector<long> counts(std::max(omega, 1), 0);
    for (const auto& c : find_tcycles(X, O, omega - 1, true, s, cfg.cycle_budget))
      counts[(int)c.elems.size() - 1]++;
    return counts;
  };

  auto cur = metric(A);
  for (long iter = 0; iter < cfg.max_iterations; ++iter) {
    auto cycles = find_tcycles(A, O, omega - 1, true, s, cfg.cycle_budget);
    if (cycles.empty()) break;
    const TCycle& victim = cycles.front();  // minimal length, lexicographic
    A = break_strong_tcycle(A, O, victim, omega, t, s);
    if (log) {
      std::ostringstream os;
      os << "destroyed strong t-cycle of length " << victim.elems.size();
      log->events.push_back(os.str());
    }
    auto next = metric(A);
    if (!(next < cur)) throw ProgressStalled();
    cur = next;
  }
  return A;
}

Structure eliminate_tcycles(const Structure& A0, const std::set<int>& O, int omega,
                            const NormalTheoryC2& t, const SignatureStar& s,
                            SurgeryConfig cfg, SurgeryLog* log) {
  // strong cycles first (skipping the duplication when none are present)
  Structure A =
      find_tcycles(A0, O, omega - 1, true, s, cfg.cycle_budget).empty()
          ? A0
          : eliminate_strong_tcycles(A0, O, omega, t, s, cfg, log);

  // silence the non-vacuous silent pairs outside O
  A = silent_to_vacuous(A, s, O);
  if (log) log->events.push_back("silent pairs made vacuous");

  // non-invertible message pairs
  std::vector<std::pair<int, int>> S;
  for (int a = 0; a < A.n; ++a)
    for (int b = 0; b < A.n; ++b) {
      if (a == b) continue;
      if (O.count(a) && O.count(b)) continue;
      TwoType tau = two_type_of(A, s, a, b);
      if (classify(s, tau) == TwoTypeClass::NonInvertibleMessage && is_message(s, tau))
        S.push_back({a, b});
    }
  long Y = (long)S.size();
  if (Y == 0) return A;

  // the copy tree: sequences over S of length <= omega
  long copies = 1, pw = 1;
  for (int i = 1; i <= omega; ++i) {
    pw *= Y;
    copies += pw;
    if (copies * (long)A.n > cfg.tree_cap) throw CapExceeded(copies * (long)A.n);
  }
  // tier/parent bookkeeping: nodes indexed 0..copies-1 in BFS order
  std::vector<int> tier{0}, parent{-1}, via{-1};
  std::vector<std::vector<long>> child;  // node x S-index -> node
  child.push_back(std::vector<long>(Y, -1));
  std::vector<long> frontier{0};
  for (int d = 1; d <= omega; ++d) {
    std::vector<long> next;
    for (long node : frontier)
      for (long si = 0; si < Y; ++si) {
        long id = (long)tier.size();
        tier.push_back(d);
        parent.push_back((int)node);
        via.push_back((int)si);
        child.push_back(std::vector<long>(Y, -1));
        child[node][si] = id;
        next.push_back(id);
      }
    frontier = std::move(next);
  }

  Structure B = disjoint_copies(A, (int)copies);
  auto elem = [&](long node, int a) { return (int)(node * A.n + a); };

  for (long node = 0; node < copies; ++node) {
    for (long si = 0; si < Y; ++si) {
      auto [a, b] = S[si];
      TwoType mu = two_type_of(A, s, a, b);
      long target_node;
      if (tier[node] < omega) {
        target_node = child[node][si];
      } else {
        // bottom tier: loop back to the second tier
        target_node = 1 + si;
      }
      // divert: the message a_node -> b_node becomes a_node -> b_target
      OneType pa = one_type_of(A, s, a), pb = one_type_of(A, s, b);
      set_two_type(B, s, elem(node, a), elem(node, b), vacuous_product(pa, pb));
      set_two_type(B, s, elem(node, a), elem(target_node, b), mu);
    }
  }
  if (log) {
    std::ostringstream os;
    os << "redirected " << Y << " message pairs across " << copies << " copies";
    log->events.push_back(os.str());
  }
  return B;
}

}  // namespace c2data
