#pragma once

#include <optional>
#include <string>
#include <vector>

#include "c2data/frames.hpp"
#include "c2data/normal_form.hpp"

namespace c2data {

struct RunConfig {
  long node_budget = 10000000;     // oracle search budget (nodes)
  long solver_conflicts = 2000000; // per grounded solve
  long star_cap = 300000;          // valid-star pool cap
  int padding_override = -1;       // -1: the Z-derived default
  int guided_extra = 3;            // extra elements for the guided model search
  int merge_cap = 5;               // max #constants for full merged search
  int small_search_max = 6;        // size bound for the merged search
  long dplus_cap = 2000;           // data-candidate stream cap
  int pool_exhaust_cap = 12;       // frame-subset exhaustion bound
  long delta_product_cap = 5000;   // delta-assignment product cap
  int padding_pattern_elems = 3;   // max |D| for padding-pattern enumeration
};

struct SatCertificate {
  bool finite_mode = false;
  bool small_model_branch = false;
  int padding_override = -1;

  Structure small;  // small-model branch

  // frame branch
  Structure dplus;                        // over Sigma* + Sigma_Delta
  Frame frame;
  std::vector<int> delta_star;            // element of D -> star index (< N')
  std::vector<long> delta_counts;         // n_1..n_{N'}
  std::vector<LinearAtom> chosen_atoms;   // E'
  std::vector<ExtNat> solution;           // w
};

struct Verdict {
  enum class Kind { Sat, Unsat, Inconclusive } kind = Kind::Inconclusive;
  std::optional<SatCertificate> cert;
  std::string detail;
};

Verdict decide(const NormalTheoryC2& t, const Dataset& delta, bool finite_mode,
               const RunConfig& cfg = {});

// Candidate data structures: quotients of the constants satisfying the
// dataset, the alpha clause on distinct pairs, and the one-variable closure
// of alpha. Deterministic order; at most max_count entries ("capped" reports
// truncation).
std::vector<Structure> enumerate_dplus(const Dataset& delta, const NormalTheoryC2& t,
                                       long max_count, bool* capped = nullptr);

bool verify_certificate(const SatCertificate& cert, const NormalTheoryC2& t,
                        const Dataset& delta, long realize_cap = 24);

// The explicit model behind a certificate: the small model, or the realized
// frame model with the data structure spliced in. nullopt when the solution
// is infinite or larger than cap.
std::optional<Structure> certificate_model(const SatCertificate& cert,
                                           const NormalTheoryC2& t,
                                           const Dataset& delta, long cap = 24);

// The valid-star pool: chromatic, C-bounded star-types whose messages pass
// alpha in both orientations, whose 1-type passes the one-variable closure,
// and whose per-predicate message sums equal the counting bounds.
std::vector<StarType> valid_star_pool(const NormalTheoryC2& t, const SignatureStar& s,
                                      long cap, bool* capped);

}  // namespace c2data
