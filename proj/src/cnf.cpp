#include "c2data/cnf.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace c2data {

int CnfSolver::new_var() {
  int v = nvars_++;
  assign_.push_back(0);
  level_.push_back(-1);
  reason_.push_back(-1);
  activity_.push_back(0.0);
  watches_.push_back({});
  watches_.push_back({});
  heap_pos_.push_back(-1);
  heap_insert(v);
  return v;
}

void CnfSolver::heap_up(int i) {
  int v = heap_[i];
  while (i > 0) {
    int p = (i - 1) >> 1;
    if (!heap_lt(v, heap_[p])) break;
    heap_[i] = heap_[p];
    heap_pos_[heap_[i]] = i;
    i = p;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

void CnfSolver::heap_down(int i) {
  int v = heap_[i];
  int n = (int)heap_.size();
  for (;;) {
    int l = 2 * i + 1, r = 2 * i + 2;
    int best = -1;
    if (l < n && heap_lt(heap_[l], v)) best = l;
    if (r < n && heap_lt(heap_[r], best < 0 ? v : heap_[best])) best = r;
    if (best < 0) break;
    heap_[i] = heap_[best];
    heap_pos_[heap_[i]] = i;
    i = best;
  }
  heap_[i] = v;
  heap_pos_[v] = i;
}

void CnfSolver::heap_insert(int v) {
  if (heap_pos_[v] >= 0) return;
  heap_.push_back(v);
  heap_pos_[v] = (int)heap_.size() - 1;
  heap_up(heap_pos_[v]);
}

void CnfSolver::heap_update(int v) {
  if (heap_pos_[v] >= 0) heap_up(heap_pos_[v]);
}

void CnfSolver::attach(int ci) {
  const auto& c = clauses_[ci].lits;
  watches_[c[0] ^ 1].push_back(ci);
  watches_[c[1] ^ 1].push_back(ci);
}

void CnfSolver::add_clause(std::vector<int> lits) {
  if (unsat0_) return;
  assert(decision_level() == 0);
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<int> out;
  for (size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && (lits[i] ^ 1) == lits[i + 1]) return;  // tautology
    int lit = lits[i];
    if (lit_true(lit)) return;
    if (lit_false(lit)) continue;
    out.push_back(lit);
  }
  if (out.empty()) {
    unsat0_ = true;
    return;
  }
  if (out.size() == 1) {
    enqueue(out[0], -1);
    if (propagate() != -1) unsat0_ = true;
    return;
  }
  clauses_.push_back(Clause{std::move(out), false});
  attach((int)clauses_.size() - 1);
}

void CnfSolver::enqueue(int lit, int reason) {
  int v = lit >> 1;
  assign_[v] = (lit & 1) ? -1 : 1;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(lit);
}

int CnfSolver::propagate() {
  while (qhead_ < trail_.size()) {
    int lit = trail_[qhead_++];
    auto& ws = watches_[lit];
    size_t j = 0;
    for (size_t i = 0; i < ws.size(); ++i) {
      int ci = ws[i];
      auto& c = clauses_[ci].lits;
      if (c[0] == (lit ^ 1)) std::swap(c[0], c[1]);
      // now c[1] is the false watched literal
      if (lit_true(c[0])) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (size_t k = 2; k < c.size(); ++k) {
        if (!lit_false(c[k])) {
          std::swap(c[1], c[k]);
          watches_[c[1] ^ 1].push_back(ci);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = ci;
      if (lit_false(c[0])) {
        while (++i < ws.size()) ws[j++] = ws[i];
        ws.resize(j);
        return ci;
      }
      if (lit_unset(c[0])) enqueue(c[0], ci);
    }
    ws.resize(j);
  }
  return -1;
}

void CnfSolver::cancel_until(int lvl) {
  if (decision_level() <= lvl) return;
  int bound = trail_lim_[lvl];
  for (int i = (int)trail_.size() - 1; i >= bound; --i) {
    int v = trail_[i] >> 1;
    assign_[v] = 0;
    reason_[v] = -1;
    level_[v] = -1;
    heap_insert(v);
  }
  trail_.resize(bound);
  trail_lim_.resize(lvl);
  qhead_ = trail_.size();
}

void CnfSolver::bump(int v) {
  activity_[v] += act_inc_;
  if (activity_[v] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    act_inc_ *= 1e-100;
  }
  heap_update(v);
}

void CnfSolver::decay() { act_inc_ *= 1.0 / 0.95; }

int CnfSolver::pick_branch_var() {
  for (;;) {
    if (heap_.empty()) return -1;
    int v = heap_[0];
    int last = heap_.back();
    heap_.pop_back();
    heap_pos_[v] = -1;
    if (!heap_.empty()) {
      heap_[0] = last;
      heap_pos_[last] = 0;
      heap_down(0);
    }
    if (assign_[v] == 0) return v;
  }
}

int CnfSolver::analyze(int confl, std::vector<int>& learnt) {
  learnt.clear();
  learnt.push_back(0);
  std::vector<char> seen(nvars_, 0);
  int counter = 0;
  int lit = -1;
  int idx = (int)trail_.size() - 1;
  int btlevel = 0;
  int cur = confl;
  for (;;) {
    const auto& c = clauses_[cur].lits;
    for (int q : c) {
      if (lit != -1 && q == lit) continue;
      int v = q >> 1;
      if (!seen[v] && level_[v] > 0) {
        seen[v] = 1;
        bump(v);
        if (level_[v] >= decision_level()) {
          ++counter;
        } else {
          learnt.push_back(q);
          btlevel = std::max(btlevel, level_[v]);
        }
      }
    }
    while (idx >= 0 && !seen[trail_[idx] >> 1]) --idx;
    assert(idx >= 0);
    lit = trail_[idx];
    int v = lit >> 1;
    seen[v] = 0;
    --counter;
    --idx;
    if (counter <= 0) break;
    cur = reason_[v];
    assert(cur != -1);
  }
  learnt[0] = lit ^ 1;
  return btlevel;
}

CnfSolver::Status CnfSolver::solve(long budget_conflicts) {
  if (unsat0_) return Status::Unsat;
  long limit = budget_conflicts < 0 ? -1 : conflicts_ + budget_conflicts;

  for (;;) {
    int confl = propagate();
    if (confl != -1) {
      ++conflicts_;
      if (decision_level() == 0) {
        unsat0_ = true;
        return Status::Unsat;
      }
      if (limit >= 0 && conflicts_ >= limit) {
        cancel_until(0);
        return Status::Budget;
      }
      std::vector<int> learnt;
      int bt = analyze(confl, learnt);
      cancel_until(bt);
      if (learnt.size() == 1) {
        cancel_until(0);
        if (lit_false(learnt[0])) {
          unsat0_ = true;
          return Status::Unsat;
        }
        if (lit_unset(learnt[0])) enqueue(learnt[0], -1);
      } else {
        clauses_.push_back(Clause{learnt, true});
        int ci = (int)clauses_.size() - 1;
        auto& c = clauses_[ci].lits;
        int best = 1;
        for (size_t k = 2; k < c.size(); ++k)
          if (level_[c[k] >> 1] > level_[c[best] >> 1]) best = (int)k;
        std::swap(c[1], c[best]);
        attach(ci);
        enqueue(c[0], ci);
      }
      decay();
      continue;
    }
    int v = pick_branch_var();
    if (v == -1) return Status::Sat;
    ++decisions_;
    trail_lim_.push_back((int)trail_.size());
    enqueue(CnfSolver::neg(v), -1);  // false first
  }
}

CnfSolver::Status CnfSolver::enumerate(const std::vector<int>& proj,
                                       const std::function<bool(const CnfSolver&)>& cb,
                                       long budget_conflicts) {
  for (;;) {
    Status st = solve(budget_conflicts);
    if (st != Status::Sat) return st;
    if (!cb(*this)) return Status::Sat;
    std::vector<int> block;
    block.reserve(proj.size());
    for (int v : proj) block.push_back(assign_[v] == 1 ? neg(v) : pos(v));
    cancel_until(0);
    if (block.empty()) return Status::Unsat;
    add_clause(std::move(block));
    if (unsat0_) return Status::Unsat;
  }
}

// ---------------------------------------------------------------------------
// Cardinality encodings (sequential counter)
// ---------------------------------------------------------------------------

// s[i][j] <-> at least j of the first i literals are true, for j in 1..kk.
static std::vector<std::vector<int>> counter_vars(CnfSolver& s,
                                                  const std::vector<int>& lits, int kk) {
  int n = (int)lits.size();
  std::vector<std::vector<int>> sv(n + 1, std::vector<int>(kk + 1, -1));
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= std::min(i, kk); ++j) sv[i][j] = s.new_var();
  for (int i = 1; i <= n; ++i) {
    int xi = lits[i - 1];
    for (int j = 1; j <= std::min(i, kk); ++j) {
      int sij = CnfSolver::pos(sv[i][j]);
      int prev = (i > 1 && j <= i - 1) ? sv[i - 1][j] : -1;       // -1 means false
      int prev1 = j == 1 ? -2 : ((i > 1 && j - 1 <= i - 1) ? sv[i - 1][j - 1] : -1);
      // prev -> s_ij
      if (prev != -1) s.add_clause({CnfSolver::neg(prev), sij});
      // x_i & prev1 -> s_ij
      if (prev1 == -2) {
        s.add_clause({xi ^ 1, sij});
      } else if (prev1 != -1) {
        s.add_clause({xi ^ 1, CnfSolver::neg(prev1), sij});
      }
      // s_ij -> prev | x_i
      {
        std::vector<int> cl{sij ^ 1, xi};
        if (prev != -1) cl.push_back(CnfSolver::pos(prev));
        s.add_clause(cl);
      }
      // s_ij -> prev | prev1   (skip when prev1 is true)
      if (prev1 != -2) {
        std::vector<int> cl{sij ^ 1};
        if (prev != -1) cl.push_back(CnfSolver::pos(prev));
        if (prev1 != -1) cl.push_back(CnfSolver::pos(prev1));
        s.add_clause(cl);
      }
    }
  }
  return sv;
}

int encode_at_least(CnfSolver& s, const std::vector<int>& lits, int k) {
  int tv = s.new_var();
  if (k <= 0) {
    s.add_unit(CnfSolver::pos(tv));
    return CnfSolver::pos(tv);
  }
  if ((int)lits.size() < k) {
    s.add_unit(CnfSolver::neg(tv));
    return CnfSolver::pos(tv);
  }
  auto sv = counter_vars(s, lits, k);
  int root = sv[lits.size()][k];
  s.add_clause({CnfSolver::neg(tv), CnfSolver::pos(root)});
  s.add_clause({CnfSolver::pos(tv), CnfSolver::neg(root)});
  return CnfSolver::pos(tv);
}

void encode_exactly(CnfSolver& s, const std::vector<int>& lits, int k) {
  int n = (int)lits.size();
  if (k > n) {
    s.add_clause({});
    return;
  }
  if (k == 0) {
    for (int l : lits) s.add_unit(l ^ 1);
    return;
  }
  int kk = std::min(n, k + 1);
  auto sv = counter_vars(s, lits, kk);
  s.add_unit(CnfSolver::pos(sv[n][k]));
  if (k + 1 <= n) s.add_unit(CnfSolver::neg(sv[n][k + 1]));
}

}  // namespace c2data
