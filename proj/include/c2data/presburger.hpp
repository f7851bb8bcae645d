#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace c2data {

// ---------------------------------------------------------------------------
// Extended naturals N* = N ∪ {ℵ0}
// ---------------------------------------------------------------------------

class ExtNat {
 public:
  ExtNat() : inf_(false), v_(0) {}
  ExtNat(unsigned long v) : inf_(false), v_(v) {}  // NOLINT: implicit by design
  static ExtNat infinity() {
    ExtNat e;
    e.inf_ = true;
    return e;
  }

  bool is_inf() const { return inf_; }
  unsigned long value() const {
    if (inf_) throw std::logic_error("value() of infinity");
    return v_;
  }

  friend ExtNat operator+(ExtNat a, ExtNat b) {
    if (a.inf_ || b.inf_) return infinity();
    return ExtNat(a.v_ + b.v_);
  }
  friend ExtNat operator*(ExtNat a, ExtNat b) {
    if (!a.inf_ && a.v_ == 0) return ExtNat(0);
    if (!b.inf_ && b.v_ == 0) return ExtNat(0);
    if (a.inf_ || b.inf_) return infinity();
    return ExtNat(a.v_ * b.v_);
  }
  friend bool operator==(ExtNat a, ExtNat b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
  }
  friend bool operator!=(ExtNat a, ExtNat b) { return !(a == b); }
  friend bool operator<(ExtNat a, ExtNat b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.v_ < b.v_;
  }
  friend bool operator>(ExtNat a, ExtNat b) { return b < a; }
  friend bool operator<=(ExtNat a, ExtNat b) { return !(b < a); }
  friend bool operator>=(ExtNat a, ExtNat b) { return !(a < b); }

  std::string str() const { return inf_ ? "inf" : std::to_string(v_); }

 private:
  bool inf_;
  unsigned long v_;
};

struct NegativeCoefficientOnInfinite : std::runtime_error {
  NegativeCoefficientOnInfinite()
      : std::runtime_error("negative coefficient on an infinite variable") {}
};

struct VariableLimitExceeded : std::runtime_error {
  explicit VariableLimitExceeded(size_t n)
      : std::runtime_error("variable limit exceeded: " + std::to_string(n)) {}
};

// ---------------------------------------------------------------------------
// Linear atoms and positive constraint systems
// ---------------------------------------------------------------------------

struct LinearExpr {
  std::map<std::string, long> coef;
  long cst = 0;

  LinearExpr() = default;
  explicit LinearExpr(long c) : cst(c) {}
  static LinearExpr variable(const std::string& v, long c = 1) {
    LinearExpr e;
    e.coef[v] = c;
    return e;
  }
  LinearExpr& add(const std::string& v, long c) {
    coef[v] += c;
    if (coef[v] == 0) coef.erase(v);
    return *this;
  }
  LinearExpr& operator+=(const LinearExpr& o) {
    for (const auto& [v, c] : o.coef) add(v, c);
    cst += o.cst;
    return *this;
  }
  std::string str() const;
};

enum class Rel { Eq, Le, Lt, Ge, Gt };

struct LinearAtom {
  LinearExpr lhs, rhs;
  Rel rel = Rel::Eq;
  std::string str() const;
};

struct CSNode;
using CSPtr = std::shared_ptr<const CSNode>;

struct CSNode {
  enum Type { Atom, And, Or } type = Atom;
  LinearAtom atom;
  std::vector<CSPtr> kids;
};

CSPtr cs_atom(LinearAtom a);
CSPtr cs_and(std::vector<CSPtr> kids);
CSPtr cs_or(std::vector<CSPtr> kids);

struct ConstraintSystem {
  CSPtr root;                                     // positive combination
  std::vector<std::pair<std::string, long>> pinned;  // w_k = n_k

  std::vector<std::string> variables() const;
  std::string to_sexpr() const;  // debug dump, one atom per line
  bool has_negation_free_shape() const { return true; }  // by construction
};

// ---------------------------------------------------------------------------
// Evaluation and feasibility
// ---------------------------------------------------------------------------

using ExtAssignment = std::map<std::string, ExtNat>;

ExtNat eval_extnat(const LinearExpr& e, const ExtAssignment& a);
bool eval_extnat(const LinearAtom& at, const ExtAssignment& a);

enum class FeasMode { Nat, ExtNat };

struct Witness {
  ExtAssignment values;
};
struct Infeasible {};

using FeasResult = std::variant<Witness, Infeasible>;

struct FeasConfig {
  size_t var_limit = 32;
};

FeasResult feasible(const ConstraintSystem& sys, FeasMode mode, FeasConfig cfg = {});
bool check_witness(const ConstraintSystem& sys, const ExtAssignment& a, FeasMode mode);

// Exact integer feasibility of a conjunction of atoms over nonnegative
// integers (exposed for tests).
std::optional<std::map<std::string, long>> solve_nat_conjunction(
    const std::vector<LinearAtom>& atoms);

}  // namespace c2data
