#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "c2data/model.hpp"
#include "c2data/syntax.hpp"

namespace c2data {

// Normal C2 theory:
//   forall x forall y (alpha | x = y)  &  AND_h forall x exists=C_h y (f_h(x,y) & x != y)
struct NormalTheoryC2 {
  FormulaPtr alpha;    // quantifier-free, equality-free, over {x,y}
  FormulaPtr one_var;  // chi(x): conjunction of the one-variable conjuncts of alpha
  std::vector<std::pair<std::string, long>> counting;  // (f_h, C_h)
  long C = 1;          // max(1, max C_h)
  Signature sigma;     // signature of phi*
  FormulaPtr original;

  FormulaPtr phi_star() const;
};

// Normal GC2 theory:
//   forall x alpha1  &  AND_h forall x forall y (e_h(x,y) -> (beta_h | x = y))
//                     &  AND_i forall x exists=C_i y (f_i(x,y) & x != y)
struct GuardClause {
  std::string guard;  // binary predicate e_h
  FormulaPtr beta;    // quantifier-free over {x,y}
};

struct NormalTheoryGC2 {
  FormulaPtr alpha1;  // quantifier-free one-variable formula over x
  std::vector<GuardClause> guards;
  std::vector<std::pair<std::string, long>> counting;
  long C = 1;
  Signature sigma;
  FormulaPtr original;

  FormulaPtr phi_star() const;
};

struct UnsupportedShape : std::runtime_error {
  explicit UnsupportedShape(const std::string& why)
      : std::runtime_error("normalization does not support: " + why) {}
};

NormalTheoryC2 scott_c2(const FormulaPtr& phi);
NormalTheoryGC2 scott_gc2(const FormulaPtr& phi);
NormalTheoryC2 fold_gc2_to_c2(const NormalTheoryGC2& t);

// Exhaustive search over sizes 1..C for models of phi + delta.
using SmallModelResult = std::variant<Structure, NoneWithin, BudgetExceeded>;
SmallModelResult small_model_check(const FormulaPtr& phi, const Dataset& delta, long C,
                                   SearchBudget budget = {});

// Simplifying connective constructors (constant folding).
FormulaPtr s_not(FormulaPtr f);
FormulaPtr s_and(FormulaPtr a, FormulaPtr b);
FormulaPtr s_or(FormulaPtr a, FormulaPtr b);
FormulaPtr s_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr swap_xy(const FormulaPtr& f);
// Resolve equality atoms under the "x and y denote distinct elements"
// convention: x = x is true, x = y is false.
FormulaPtr resolve_equalities_distinct(const FormulaPtr& f);

}  // namespace c2data
