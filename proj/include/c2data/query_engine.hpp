#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "c2data/sat_engine.hpp"
#include "c2data/surgery.hpp"

namespace c2data {

// A universally quantified negative clause: forall vars . OR of negated atoms.
struct QLiteral {
  std::string pred;
  std::vector<Term> args;  // variables and constants

  bool operator==(const QLiteral& o) const { return pred == o.pred && args == o.args; }
  bool operator<(const QLiteral& o) const {
    if (pred != o.pred) return pred < o.pred;
    return args < o.args;
  }
};

struct UniversalClause {
  std::vector<std::string> vars;
  std::vector<QLiteral> lits;

  std::string str() const;
};

struct MultipleConstants : std::runtime_error {
  MultipleConstants() : std::runtime_error("clause has more than one constant") {}
};

struct NotATree : std::runtime_error {
  NotATree() : std::runtime_error("clause graph is not a tree") {}
};

// Instantiation of the negated query over substitutions into vars + constants.
struct InstantiationResult {
  std::vector<UniversalClause> kept;     // Xi_2: v-acyclic
  std::vector<UniversalClause> dropped;  // Xi_1: v-cyclic (the Upsilon side)
};

InstantiationResult negate_and_instantiate(const Query& q,
                                           const std::vector<std::string>& tuple,
                                           const std::vector<std::string>& K);

bool is_v_cyclic(const UniversalClause& c);

struct AssumeGround {
  GroundLiteral lit;  // negative ground literal assumed into the data
};
struct Component {
  UniversalClause clause;
  bool unsplittable = true;
};
using Choice = std::variant<AssumeGround, Component>;

struct ChoiceResult {
  bool discharged = false;      // a ground literal already holds
  std::vector<Choice> options;  // empty and not discharged: the clause is false
};

ChoiceResult clause_choices(const UniversalClause& c, const Dataset& delta);

// Fresh predicates are keyed by the constant-abstracted clause shape.
struct FreshPredTable {
  std::map<std::string, std::string> by_shape;
  int next = 0;
  std::vector<std::pair<std::string, std::string>> entries;  // (pred, shape)

  std::string intern(const std::string& shape);
};

struct ConstantElimination {
  std::optional<GroundLiteral> fact;  // p_i(c)
  UniversalClause clause;             // constant-free
};

ConstantElimination eliminate_constant(const UniversalClause& c, FreshPredTable& table);

// Rolls a constant-free, unsplittable, v-acyclic clause into a guarded
// one-free-variable formula rooted at the given variable.
FormulaPtr tree_rollup(const UniversalClause& c, const std::string& root);

// ---------------------------------------------------------------------------
// answer()
// ---------------------------------------------------------------------------

struct PipelineTrace {
  long partitions = 0;
  long xi_total = 0, xi1 = 0, xi2 = 0;
  std::vector<std::string> dropped_vformulas;
  std::vector<std::string> ground_choices;
  long unsplittable_components = 0;
  std::vector<std::pair<std::string, std::string>> fresh_preds;
  std::vector<std::string> delta_prime;
  std::vector<std::string> theta_conjuncts;
  std::vector<std::string> branch_verdicts;
};

struct QueryEvidence {
  std::string partition;
  std::vector<std::string> assumed;
  std::vector<std::string> theta;
  SatCertificate cert;
  NormalTheoryC2 branch_theory;
  Dataset branch_data;
  std::optional<Structure> countermodel;
};

enum class AnswerKind { Entailed, NotEntailed, Inconclusive };

struct AnswerResult {
  AnswerKind kind = AnswerKind::Inconclusive;
  std::optional<QueryEvidence> evidence;
  PipelineTrace trace;
  std::string detail;
};

struct QueryConfig {
  RunConfig sat;
  long choice_vector_cap = 100000;
  long partition_cap = 100000;
  bool realize_countermodel = true;
  long countermodel_cap = 24;
  SurgeryConfig surgery;
};

AnswerResult answer(const FormulaPtr& phi, const Query& q, const Dataset& delta,
                    const std::vector<std::string>& tuple, bool finite_mode,
                    const QueryConfig& cfg = {});

}  // namespace c2data
