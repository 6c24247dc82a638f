#pragma once

#include <optional>

#include "auxrl/ltl/formula.hpp"
#include "auxrl/ltl/trace.hpp"

namespace auxrl::ltl {

struct SatisfactionResult {
  bool satisfied = false;
  std::optional<std::size_t> first_index;  // smallest n with trace[0..n] |= f
};

/// Finite-trace satisfaction by direct recursive evaluation (not via
/// progression). A prefix satisfies f when every infinite continuation of it
/// satisfies f; first_index is the first position at which that happens.
///
/// Throws UnsupportedFragmentError when prefix satisfaction is undefined for
/// f (an Always surviving in positive polarity, or an Eventually/Until under
/// negation), and InvalidArgumentError on an empty trace.
SatisfactionResult satisfies(const Trace& trace, const Formula& f);

/// True when f is in the supported co-safe fragment (see satisfies).
bool is_cosafe(const Formula& f);

}  // namespace auxrl::ltl
