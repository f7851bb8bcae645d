#pragma once

#include <map>
#include <set>
#include <vector>

#include "c2data/presburger.hpp"
#include "c2data/typespace.hpp"

namespace c2data {

struct PreconditionViolated : std::runtime_error {
  explicit PreconditionViolated(const std::string& why)
      : std::runtime_error("precondition violated: " + why) {}
};

struct ResourceExceeded {
  long nodes = 0;
};

using TypePair = std::pair<OneType, OneType>;  // normalized first <= second

inline TypePair norm_pair(OneType a, OneType b) {
  return b < a ? TypePair{b, a} : TypePair{a, b};
}

struct Frame {
  std::vector<StarType> stars;       // pairwise distinct; observable stars first
  int n_observable = 0;              // N'
  std::set<TypePair> quiet;          // I
  std::map<TypePair, TwoType> theta; // tp1 = first, tp2 = second

  bool chromatic(const SignatureStar& s) const;
  bool bounded(long D) const;
  bool well_formed(const SignatureStar& s) const;  // Def. frame clauses 1-3
};

struct Histogram {
  std::vector<ExtNat> w;
};

std::pair<Frame, Histogram> extract_frame(const Structure& A, const SignatureStar& s);

bool frame_models(const Frame& F, const NormalTheoryC2& t, const SignatureStar& s);

// Variables are named w0..w{N-1} in star order.
ConstraintSystem assemble_constraints(const Frame& F, const SignatureStar& s);

// Literal evaluation of C1-C6 (independent of assemble_constraints).
bool check_solution(const Frame& F, const std::vector<ExtNat>& w, const SignatureStar& s);

using RealizeResult = std::variant<Structure, ResourceExceeded>;
RealizeResult realize_frame(const Frame& F, const std::vector<ExtNat>& w,
                            const NormalTheoryC2& t, const SignatureStar& s,
                            long cap = 64, long node_budget = 2000000);

// Does F describe A (Def. describes, all three clauses)?
bool frame_describes(const Frame& F, const Structure& A, const SignatureStar& s);

}  // namespace c2data
