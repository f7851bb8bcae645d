#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace c2data {

// ---------------------------------------------------------------------------
// Signatures
// ---------------------------------------------------------------------------

struct Signature {
  std::set<std::string> unary;
  std::set<std::string> binary;
  std::set<std::string> constants;

  bool has_unary(const std::string& p) const { return unary.count(p) != 0; }
  bool has_binary(const std::string& p) const { return binary.count(p) != 0; }
  void merge(const Signature& other);
};

// ---------------------------------------------------------------------------
// Terms and formulas
// ---------------------------------------------------------------------------

struct Term {
  bool is_var = true;
  std::string name;

  bool operator==(const Term& o) const { return is_var == o.is_var && name == o.name; }
  bool operator<(const Term& o) const {
    if (is_var != o.is_var) return is_var < o.is_var;
    return name < o.name;
  }
};

inline Term var(std::string n) { return Term{true, std::move(n)}; }
inline Term cst(std::string n) { return Term{false, std::move(n)}; }

enum class Kind {
  True, False, Atom, Equal, Not, And, Or, Implies, Iff, Forall, Exists, Count
};

enum class CountKind { Geq, Leq, Eq };

struct SrcSpan {
  int line = 0;
  int col = 0;
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  Kind kind;
  // Atom: pred + args; Equal: args[0], args[1]
  std::string pred;
  std::vector<Term> args;
  // Quantifiers
  std::string qvar;
  CountKind ck = CountKind::Geq;
  long bound = 0;
  std::vector<FormulaPtr> kids;
  SrcSpan span;
};

FormulaPtr mk_true();
FormulaPtr mk_false();
FormulaPtr mk_atom(std::string pred, std::vector<Term> args, SrcSpan s = {});
FormulaPtr mk_equal(Term a, Term b, SrcSpan s = {});
FormulaPtr mk_not(FormulaPtr f);
FormulaPtr mk_and(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_iff(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_forall(std::string v, FormulaPtr body);
FormulaPtr mk_exists(std::string v, FormulaPtr body);
FormulaPtr mk_count(CountKind ck, long bound, std::string v, FormulaPtr body);
FormulaPtr mk_and_all(const std::vector<FormulaPtr>& fs);  // empty -> true
FormulaPtr mk_or_all(const std::vector<FormulaPtr>& fs);   // empty -> false

std::string render(const FormulaPtr& f);
bool formula_equal(const FormulaPtr& a, const FormulaPtr& b);

std::set<std::string> free_vars(const FormulaPtr& f);
std::set<std::string> all_vars(const FormulaPtr& f);
Signature signature_of(const FormulaPtr& f);
Signature signature_of(const std::vector<FormulaPtr>& fs);

// Capture-free only in the two-variable setting used here: substitution stops
// at quantifiers rebinding v.
FormulaPtr substitute_var(const FormulaPtr& f, const std::string& v, const Term& t);

// ---------------------------------------------------------------------------
// Datasets and queries
// ---------------------------------------------------------------------------

struct GroundAtom {
  std::string pred;
  std::vector<std::string> consts;  // arity 1 or 2

  bool operator==(const GroundAtom& o) const { return pred == o.pred && consts == o.consts; }
  bool operator<(const GroundAtom& o) const {
    if (pred != o.pred) return pred < o.pred;
    return consts < o.consts;
  }
};

struct GroundLiteral {
  bool positive = true;
  GroundAtom atom;

  bool operator<(const GroundLiteral& o) const {
    if (atom < o.atom || o.atom < atom) return atom < o.atom;
    return positive < o.positive;
  }
};

struct ConstEq {
  bool equal = true;  // c = d vs c != d
  std::string lhs, rhs;

  bool operator<(const ConstEq& o) const {
    return std::tie(equal, lhs, rhs) < std::tie(o.equal, o.lhs, o.rhs);
  }
};

struct Dataset {
  std::set<GroundLiteral> literals;
  std::set<ConstEq> eqs;

  std::set<std::string> constants() const;
  Signature signature() const;
  std::string render() const;
};

struct Query {
  std::vector<std::string> head_vars;   // ȳ
  std::vector<std::string> exist_vars;  // x̄
  std::vector<GroundAtom> atoms;        // args are variable names here
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct ParseError : std::runtime_error {
  int line, col;
  std::vector<std::string> expected;
  ParseError(int line, int col, std::string msg, std::vector<std::string> exp = {});
};

struct ContradictionError : std::runtime_error {
  GroundAtom atom;
  explicit ContradictionError(GroundAtom a);
};

struct EqualityInQuery : std::runtime_error {
  EqualityInQuery() : std::runtime_error("equality atom in query") {}
};

struct ConstantInQuery : std::runtime_error {
  explicit ConstantInQuery(const std::string& t)
      : std::runtime_error("constant in query: " + t) {}
};

struct FragmentViolationError : std::runtime_error {
  explicit FragmentViolationError(const std::string& why)
      : std::runtime_error("fragment violation: " + why) {}
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

// One sentence per line, '#' comments. Theories are constant-free: every
// identifier in term position is a variable.
std::vector<FormulaPtr> parse_theory(const std::string& text);
FormulaPtr parse_sentence(const std::string& text);
Dataset parse_data(const std::string& text);
Query parse_query(const std::string& text);

// ---------------------------------------------------------------------------
// Fragment checking
// ---------------------------------------------------------------------------

enum class Fragment { C2, GC2, G2minus, L2minus };

struct Violation {
  std::vector<int> path;  // child indices from the root
  std::string reason;
};

// OK <=> nullopt.
std::optional<Violation> check_fragment(const FormulaPtr& f, Fragment mode);
const Formula* resolve_path(const FormulaPtr& root, const std::vector<int>& path);
std::string fragment_name(Fragment f);

}  // namespace c2data
