#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "c2data/syntax.hpp"

namespace c2data {

// Explicit finite structure. Equality is identity of elements; it is never
// stored in a table.
struct Structure {
  int n = 0;
  std::map<std::string, std::vector<uint8_t>> unary;   // pred -> n flags
  std::map<std::string, std::vector<uint8_t>> binary;  // pred -> n*n flags
  std::map<std::string, int> const_map;

  void ensure_pred(const Signature& sig);
  bool get1(const std::string& p, int a) const;
  bool get2(const std::string& r, int a, int b) const;
  void set1(const std::string& p, int a, bool v);
  void set2(const std::string& r, int a, int b, bool v);
  Signature signature() const;
  bool operator==(const Structure& o) const;
};

struct UnknownSymbol : std::runtime_error {
  explicit UnknownSymbol(const std::string& s)
      : std::runtime_error("unknown symbol: " + s) {}
};

struct ArityMismatch : std::runtime_error {
  explicit ArityMismatch(const std::string& s)
      : std::runtime_error("arity mismatch: " + s) {}
};

using Assignment = std::map<std::string, int>;

bool evaluate(const Structure& A, const FormulaPtr& f, const Assignment& theta);
bool evaluate(const Structure& A, const FormulaPtr& f);  // sentences
bool satisfies_dataset(const Structure& A, const Dataset& d);
bool evaluate_query(const Structure& A, const Query& q,
                    const std::vector<std::string>& tuple);

// ---------------------------------------------------------------------------
// Exhaustive model search
// ---------------------------------------------------------------------------

struct NoneWithin {
  int hi;
};
struct BudgetExceeded {
  long nodes;
};
using FindResult = std::variant<Structure, NoneWithin, BudgetExceeded>;

struct SearchBudget {
  long nodes = 10000000;  // conflicts + decisions across the whole call
};

// Exhaustive search over domain sizes lo..hi. Constants may share elements
// unless the dataset's inequalities forbid it; constant placements are
// enumerated first (canonical first-use order), then ground atoms. A returned
// structure is re-verified against every formula and the dataset.
FindResult find_model(const std::vector<FormulaPtr>& phis, const Dataset& delta,
                      int lo, int hi, SearchBudget budget = {});

// Enumerates models of a fixed size in canonical order, up to max_count.
// Returns the models found (may be fewer if the space or budget is exhausted).
std::vector<Structure> enumerate_models(const std::vector<FormulaPtr>& phis,
                                        const Dataset& delta, int n, int max_count,
                                        SearchBudget budget = {});

// Search at a fixed domain size with a fixed constant placement.
FindResult find_model_at(const std::vector<FormulaPtr>& phis, const Dataset& delta,
                         int n, const std::map<std::string, int>& cmap,
                         SearchBudget budget = {});

// Exhaustive search for a model of phis + delta in which the query instance
// is false (a countermodel to entailment).
FindResult find_countermodel(const std::vector<FormulaPtr>& phis, const Dataset& delta,
                             const Query& q, const std::vector<std::string>& tuple,
                             int lo, int hi, SearchBudget budget = {});

// Substructure induced on the given elements (order defines the new indices);
// constants mapping outside are dropped.
Structure restrict_structure(const Structure& A, const std::vector<int>& elems);

// All canonical placements of the named constants into 0..n-1 (first-use
// order: a fresh element is always the smallest unused index), filtered by
// the dataset's equality literals.
std::vector<std::map<std::string, int>> constant_placements(
    const std::vector<std::string>& consts, int n, const Dataset& delta,
    bool surjective = false);

}  // namespace c2data
