#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "c2data/model.hpp"
#include "c2data/normal_form.hpp"
#include "c2data/presburger.hpp"
#include "c2data/syntax.hpp"

namespace c2data {

struct CapExceeded : std::runtime_error {
  long estimate;
  explicit CapExceeded(long est)
      : std::runtime_error("enumeration cap exceeded (estimate " +
                           std::to_string(est) + ")"),
        estimate(est) {}
};

struct ColoringFailure : std::runtime_error {
  explicit ColoringFailure(const std::string& why)
      : std::runtime_error("recoloring failed: " + why) {}
};

// Sigma*: the signature of phi* extended with 2*ceil(log2 Z) padding
// predicates and the observable marker o, where Z = (mC+1)^2.
struct SignatureStar {
  Signature base;
  long Z = 1;
  int color_bits = 0;  // ceil(log2 Z); padding = color bits + tag bits
  std::vector<std::string> unary_order;   // all unary: base, padding, observable
  std::vector<std::string> binary_order;  // all binary
  std::vector<std::string> padding;       // 2*color_bits fresh unary
  std::string observable;                 // fresh unary
  std::vector<std::string> counting_preds;
  std::vector<long> counting_bounds;

  int u() const { return (int)unary_order.size(); }
  int b() const { return (int)binary_order.size(); }
  int bits() const { return u() + b(); }
  int unary_index(const std::string& p) const;
  int binary_index(const std::string& p) const;
  bool is_counting(int binary_idx) const;

  // padding_override: if >= 0, use that many color bits instead of ceil(log2 Z)
  // (test-only; sound for SAT answers, possibly incomplete).
  static SignatureStar make(const NormalTheoryC2& t, int padding_override = -1);
};

// A 1-type: total truth assignment over {p(x)} + {r(x,x)}, packed low-to-high
// as [unary_order bits][binary_order self-loop bits].
struct OneType {
  uint64_t bits = 0;
  bool operator==(const OneType& o) const { return bits == o.bits; }
  bool operator<(const OneType& o) const { return bits < o.bits; }
  bool get_unary(const SignatureStar& s, int i) const { return (bits >> i) & 1; }
  bool get_self(const SignatureStar& s, int i) const { return (bits >> (s.u() + i)) & 1; }
};

// A 2-type: 1-types of both ends plus cross literals r(x,y)/r(y,x)
// (bit 2i / 2i+1 for binary i).
struct TwoType {
  OneType tx, ty;
  uint64_t cross = 0;
  bool operator==(const TwoType& o) const {
    return tx == o.tx && ty == o.ty && cross == o.cross;
  }
  bool operator<(const TwoType& o) const {
    if (!(tx == o.tx)) return tx < o.tx;
    if (!(ty == o.ty)) return ty < o.ty;
    return cross < o.cross;
  }
  bool fwd(int i) const { return (cross >> (2 * i)) & 1; }
  bool bwd(int i) const { return (cross >> (2 * i + 1)) & 1; }
};

enum class TwoTypeClass { InvertibleMessage, NonInvertibleMessage, SilentNonVacuous, Vacuous };

TwoType invert(const TwoType& t);
OneType tp1(const TwoType& t);
OneType tp2(const TwoType& t);
bool is_message(const SignatureStar& s, const TwoType& t);   // f_h(x,y) for some h
bool is_silent(const SignatureStar& s, const TwoType& t);    // neither direction
bool is_vacuous(const TwoType& t);                           // no cross literal at all
TwoTypeClass classify(const SignatureStar& s, const TwoType& t);
TwoType vacuous_product(const OneType& p1, const OneType& p2);

std::vector<OneType> enumerate_1types(const SignatureStar& s, long cap = 1 << 20);

// Rendering (for JSON serialization and diagnostics).
std::vector<std::string> one_type_literals(const SignatureStar& s, const OneType& t);
std::vector<std::string> two_type_literals(const SignatureStar& s, const TwoType& t);
std::string one_type_str(const SignatureStar& s, const OneType& t);
std::string two_type_str(const SignatureStar& s, const TwoType& t);

// Star-type: 1-type plus message-type multiplicities (sparse).
struct StarType {
  OneType pi;
  std::map<TwoType, ExtNat> counts;  // only message types, tp1 = pi

  bool operator==(const StarType& o) const { return pi == o.pi && counts == o.counts; }
  bool operator<(const StarType& o) const {
    if (!(pi == o.pi)) return pi < o.pi;
    return counts < o.counts;
  }
};

bool star_invariant_ok(const SignatureStar& s, const StarType& st);
bool star_bounded(const StarType& st, long D);
bool star_chromatic(const SignatureStar& s, const StarType& st);
bool star_observable(const SignatureStar& s, const StarType& st);

OneType one_type_of(const Structure& A, const SignatureStar& s, int a);
TwoType two_type_of(const Structure& A, const SignatureStar& s, int a, int b);
void set_two_type(Structure& A, const SignatureStar& s, int a, int b, const TwoType& t);
StarType star_of(const Structure& A, int a, const SignatureStar& s);

// Structure-level predicates.
bool is_chromatic(const Structure& A, const SignatureStar& s);
bool is_differentiated(const Structure& A, const SignatureStar& s);

// Reinterprets the padding predicates so that the result is chromatic and
// differentiated; the base reduct is untouched.
Structure recolor(const Structure& A, const SignatureStar& s);

struct StarFilters {
  bool chromatic = false;
  std::optional<bool> observable;
};

std::vector<StarType> enumerate_star_pool(const SignatureStar& s, long C,
                                          StarFilters filters, long cap);

// Evaluates a quantifier-free two-variable formula under a 2-type.
bool eval_under_two_type(const SignatureStar& s, const FormulaPtr& f, const TwoType& t);
// Evaluates a quantifier-free one-variable formula under a 1-type.
bool eval_under_one_type(const SignatureStar& s, const FormulaPtr& f, const OneType& t);

}  // namespace c2data
