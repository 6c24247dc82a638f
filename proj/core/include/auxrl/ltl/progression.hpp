#pragma once

#include <vector>

#include "auxrl/ltl/formula.hpp"
#include "auxrl/ltl/trace.hpp"

namespace auxrl::ltl {

/// Normal form used for Q-bank keys and deduplication.
///
/// Applies constant absorption, double negation, idempotence, temporal
/// constant folds, and flattens commutative operators, ordering their
/// operands by rendered string. Disjuncts/conjuncts related by syntactic
/// implication are absorbed, so logically identical progressed forms map to
/// one representative. Idempotent.
Formula canonicalize(const Formula& f);

/// Sound syntactic implication check: true means every trace satisfying f
/// satisfies g. Incomplete (may return false for valid implications).
bool syntactically_implies(const Formula& f, const Formula& g);

/// One progression step: rewrites f against the truth assignment sigma into
/// the canonical formula that remains to be satisfied. TrueConst means every
/// continuation satisfies f; FalseConst means none does.
Formula progress(const Formula& f, const TruthAssignment& sigma);

/// Smallest set of canonical formulas containing the canonicalized tasks and
/// closed under progression over all assignments of each member's own
/// propositions. TrueConst/FalseConst are excluded. Sorted by rendered
/// string.
std::vector<Formula> progression_closure(const std::vector<Formula>& tasks);

}  // namespace auxrl::ltl
