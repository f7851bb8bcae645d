#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace c2data {

// Small CDCL SAT solver: watched literals, 1UIP learning, deterministic
// activity ordering (no restarts, no randomness), false-first polarity.
// Literals are encoded as 2*v for positive, 2*v+1 for negative (v >= 0).
class CnfSolver {
 public:
  enum class Status { Sat, Unsat, Budget };

  int new_var();
  int num_vars() const { return nvars_; }
  // Returns false if the clause is already falsified at level 0 context
  // (solver becomes permanently unsat).
  void add_clause(std::vector<int> lits);
  void add_unit(int lit) { add_clause({lit}); }

  static int pos(int v) { return 2 * v; }
  static int neg(int v) { return 2 * v + 1; }

  Status solve(long budget_conflicts = -1);
  bool value(int v) const { return assign_[v] == 1; }

  // Enumerates satisfying assignments projected onto `proj` (variable ids).
  // Callback gets the full model; return true to continue enumeration.
  // Blocking clauses are added over the projection. Returns Budget if the
  // budget ran out, Unsat when enumeration is exhausted, Sat if the callback
  // stopped early.
  Status enumerate(const std::vector<int>& proj,
                   const std::function<bool(const CnfSolver&)>& cb,
                   long budget_conflicts = -1);

  long conflicts() const { return conflicts_; }
  long decisions() const { return decisions_; }

 private:
  struct Clause {
    std::vector<int> lits;
    bool learned = false;
  };

  int nvars_ = 0;
  std::vector<Clause> clauses_;
  std::vector<std::vector<int>> watches_;  // per literal -> clause indices
  std::vector<int8_t> assign_;             // 0 unknown, 1 true, -1 false
  std::vector<int> level_;
  std::vector<int> reason_;  // clause index or -1
  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  size_t qhead_ = 0;
  std::vector<double> activity_;
  double act_inc_ = 1.0;
  bool unsat0_ = false;
  long conflicts_ = 0;
  long decisions_ = 0;

  // order heap: max activity, ties by smaller index
  std::vector<int> heap_;
  std::vector<int> heap_pos_;

  bool heap_lt(int a, int b) const {
    if (activity_[a] != activity_[b]) return activity_[a] > activity_[b];
    return a < b;
  }
  void heap_up(int i);
  void heap_down(int i);
  void heap_insert(int v);
  void heap_update(int v);

  bool lit_true(int lit) const {
    int v = lit >> 1;
    return assign_[v] == ((lit & 1) ? -1 : 1);
  }
  bool lit_false(int lit) const {
    int v = lit >> 1;
    return assign_[v] == ((lit & 1) ? 1 : -1);
  }
  bool lit_unset(int lit) const { return assign_[lit >> 1] == 0; }

  void enqueue(int lit, int reason);
  int propagate();  // returns conflicting clause index or -1
  void cancel_until(int lvl);
  int decision_level() const { return (int)trail_lim_.size(); }
  int analyze(int confl, std::vector<int>& learnt);
  void bump(int v);
  void decay();
  int pick_branch_var();
  void attach(int ci);
};

// Sequential-counter cardinality encodings over a literal list.
// Returns a literal that is true iff at least k of lits are true.
int encode_at_least(CnfSolver& s, const std::vector<int>& lits, int k);
void encode_exactly(CnfSolver& s, const std::vector<int>& lits, int k);

}  // namespace c2data
