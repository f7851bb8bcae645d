#pragma once

#include <string>
#include <vector>

#include "c2data/syntax.hpp"

namespace c2data {

struct NotThreeCNF : std::runtime_error {
  explicit NotThreeCNF(const std::string& why)
      : std::runtime_error("not a 3-CNF: " + why) {}
};

// Clauses as triples of nonzero literals (positive/negative variable ids).
using Cnf = std::vector<std::array<int, 3>>;

// DIMACS-style input: 'c' comments, optional 'p cnf' header, 0-terminated
// clauses. Clauses with fewer than three literals are padded by repetition;
// longer clauses are rejected.
Cnf parse_dimacs(const std::string& text);

// The fixed guarded theory of the reduction (counting-free, equality-free).
std::string gen3sat_theory();

// Ground literals encoding the clause set.
std::string gen3sat_facts(const Cnf& cnf);

// Truth-table satisfiability (the oracle for the reduction).
bool cnf_satisfiable(const Cnf& cnf);

}  // namespace c2data
