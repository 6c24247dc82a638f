#pragma once

#include <set>
#include <string>
#include <vector>

namespace auxrl::ltl {

/// Set of propositions true in one state; everything absent is false.
using TruthAssignment = std::set<std::string>;

/// One truth assignment per visited state, in visit order.
using Trace = std::vector<TruthAssignment>;

/// Stable single-line key for a truth assignment (props sorted, comma-joined).
std::string assignment_key(const TruthAssignment& sigma);

}  // namespace auxrl::ltl
