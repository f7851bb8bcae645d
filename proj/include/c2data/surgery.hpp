#pragma once

#include <optional>
#include <set>
#include <vector>

#include "c2data/frames.hpp"
#include "c2data/normal_form.hpp"
#include "c2data/typespace.hpp"

namespace c2data {

struct TCycle {
  std::vector<int> elems;  // cyclic sequence, length >= 3, no repeats
  bool strong = false;
};

struct ProgressStalled : std::runtime_error {
  ProgressStalled() : std::runtime_error("cycle elimination stopped making progress") {}
};

struct WitnessNotFound : std::runtime_error {
  explicit WitnessNotFound(const std::string& w)
      : std::runtime_error("surgery witnesses not found: " + w) {}
};

struct SurgeryConfig {
  long cycle_budget = 2000000;   // nodes in cycle enumeration
  long tree_cap = 200000;        // elements in the copy tree
  long max_iterations = 100000;
};

struct SurgeryLog {
  std::vector<std::string> events;  // one line per destroyed cycle / stage
};

// k >= 1 disjoint copies; constants re-pinned to copy 0.
Structure disjoint_copies(const Structure& A, int k);

// Replaces every silent 2-type by the vacuous product of its endpoint
// 1-types, sparing pairs inside `spare` (both endpoints).
Structure silent_to_vacuous(const Structure& A, const SignatureStar& s,
                            const std::set<int>& spare = {});

// Lemma-style counting argument: b in B, b' in B' with a silent 2-type.
std::pair<int, int> find_silent_pair(const Structure& A, const std::vector<int>& B,
                                     const std::vector<int>& Bp, long mC,
                                     const SignatureStar& s);

std::vector<TCycle> find_tcycles(const Structure& A, const std::set<int>& O,
                                 int max_len, bool strong_only,
                                 const SignatureStar& s,
                                 long budget = 2000000);

// Destroys one strong t-cycle (two 2-type swap stages); star-types preserved.
Structure break_strong_tcycle(const Structure& A, const std::set<int>& O,
                              const TCycle& cycle, int omega,
                              const NormalTheoryC2& t, const SignatureStar& s);

Structure eliminate_strong_tcycles(const Structure& A0, const std::set<int>& O,
                                   int omega, const NormalTheoryC2& t,
                                   const SignatureStar& s, SurgeryConfig cfg = {},
                                   SurgeryLog* log = nullptr);

Structure eliminate_tcycles(const Structure& A0, const std::set<int>& O, int omega,
                            const NormalTheoryC2& t, const SignatureStar& s,
                            SurgeryConfig cfg = {}, SurgeryLog* log = nullptr);

long surgery_copy_bound(long mC, int omega, size_t observables);  // K

}  // namespace c2data
