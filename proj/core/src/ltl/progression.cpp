#include "auxrl/ltl/progression.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "auxrl/util/errors.hpp"

namespace auxrl::ltl {

std::string assignment_key(const TruthAssignment& sigma) {
  std::string key;
  for (const auto& p : sigma) {
    if (!key.empty()) key += ',';
    key += p;
  }
  return key;
}

bool syntactically_implies(const Formula& f, const Formula& g) {
  if (f.is_false() || g.is_true()) return true;
  if (f == g) return true;

  // Decompositions on g.
  if (g.kind() == Kind::Or) {
    if (syntactically_implies(f, g.left()) || syntactically_implies(f, g.right()))
      return true;
  }
  if (g.kind() == Kind::And) {
    if (syntactically_implies(f, g.left()) && syntactically_implies(f, g.right()))
      return true;
  }
  if (g.kind() == Kind::Eventually) {
    // Anything holding now will eventually hold.
    if (syntactically_implies(f, g.left())) return true;
    // F f' |= F g'  when f' |= F g'  (and likewise for the eventual part
    // of an until or a next).
    if (f.kind() == Kind::Eventually && syntactically_implies(f.left(), g)) return true;
    if (f.kind() == Kind::Until && syntactically_implies(f.right(), g)) return true;
    if (f.kind() == Kind::Next && syntactically_implies(f.left(), g)) return true;
  }
  if (g.kind() == Kind::Until) {
    if (syntactically_implies(f, g.right())) return true;
    if (f.kind() == Kind::Until && syntactically_implies(f.left(), g.left()) &&
        syntactically_implies(f.right(), g.right()))
      return true;
  }

  // Decompositions on f.
  if (f.kind() == Kind::Or) {
    if (syntactically_implies(f.left(), g) && syntactically_implies(f.right(), g))
      return true;
  }
  if (f.kind() == Kind::And) {
    if (syntactically_implies(f.left(), g) || syntactically_implies(f.right(), g))
      return true;
  }
  if (f.kind() == Kind::Until) {
    // At the first step the until provides either its rhs or its lhs.
    if (syntactically_implies(f.left(), g) && syntactically_implies(f.right(), g))
      return true;
  }
  if (f.kind() == Kind::Always) {
    if (syntactically_implies(f.left(), g)) return true;
    if (g.kind() == Kind::Always && syntactically_implies(f.left(), g.left())) return true;
  }
  if (f.kind() == Kind::Next && g.kind() == Kind::Next) {
    if (syntactically_implies(f.left(), g.left())) return true;
  }
  if (f.kind() == Kind::Not && g.kind() == Kind::Not) {
    if (syntactically_implies(g.left(), f.left())) return true;
  }
  return false;
}

namespace {

Formula make_not(const Formula& c);
Formula make_and(std::vector<Formula> operands);
Formula make_or(std::vector<Formula> operands);
Formula make_eventually(const Formula& c);
Formula make_always(const Formula& c);
Formula make_next(const Formula& c);
Formula make_until(const Formula& l, const Formula& r);
Formula make_implies(const Formula& l, const Formula& r);

// Collects operands of nested And/Or chains of the given kind.
void flatten(Kind k, const Formula& f, std::vector<Formula>& out) {
  if (f.kind() == k) {
    flatten(k, f.left(), out);
    flatten(k, f.right(), out);
  } else {
    out.push_back(f);
  }
}

// Shared And/Or normalisation. `conj` selects conjunction semantics.
// Operands must already be canonical.
Formula make_connective(std::vector<Formula> ops, bool conj) {
  const Formula absorbing = conj ? Formula::False() : Formula::True();
  const Formula identity = conj ? Formula::True() : Formula::False();

  std::vector<Formula> flat;
  for (const auto& op : ops) flatten(conj ? Kind::And : Kind::Or, op, flat);

  // Constant absorption, then dedup by rendered string.
  std::map<std::string, Formula> uniq;
  for (const auto& op : flat) {
    if (op == absorbing) return absorbing;
    if (op == identity) continue;
    uniq.emplace(to_string(op), op);
  }

  // Absorption by implication: a conjunction keeps its strongest members,
  // a disjunction its weakest.
  std::vector<std::string> keys;
  for (const auto& [k, v] : uniq) keys.push_back(k);
  std::vector<bool> dropped(keys.size(), false);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (dropped[i]) continue;
    for (std::size_t j = 0; j < keys.size(); ++j) {
      if (i == j || dropped[j] || dropped[i]) continue;
      const Formula& fi = uniq.at(keys[i]);
      const Formula& fj = uniq.at(keys[j]);
      const bool redundant = conj ? syntactically_implies(fj, fi)
                                  : syntactically_implies(fi, fj);
      if (redundant) dropped[i] = true;
    }
  }

  std::vector<Formula> kept;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (!dropped[i]) kept.push_back(uniq.at(keys[i]));
  }
  if (kept.empty()) return identity;
  Formula result = kept.front();
  for (std::size_t i = 1; i < kept.size(); ++i) {
    result = conj ? Formula::And(result, kept[i]) : Formula::Or(result, kept[i]);
  }
  return result;
}

Formula make_and(std::vector<Formula> operands) {
  return make_connective(std::move(operands), true);
}

Formula make_or(std::vector<Formula> operands) {
  return make_connective(std::move(operands), false);
}

Formula make_not(const Formula& c) {
  if (c.is_true()) return Formula::False();
  if (c.is_false()) return Formula::True();
  if (c.kind() == Kind::Not) return c.left();
  return Formula::Not(c);
}

Formula make_next(const Formula& c) {
  if (c.is_constant()) return c;
  return Formula::Next(c);
}

Formula make_eventually(const Formula& c) {
  if (c.is_constant()) return c;
  if (c.kind() == Kind::Eventually) return c;
  return Formula::Eventually(c);
}

Formula make_always(const Formula& c) {
  if (c.is_constant()) return c;
  if (c.kind() == Kind::Always) return c;
  return Formula::Always(c);
}

Formula make_until(const Formula& l, const Formula& r) {
  if (r.is_constant()) return r;
  if (l.is_false() || l == r) return r;
  if (l.is_true()) return make_eventually(r);
  return Formula::Until(l, r);
}

Formula make_implies(const Formula& l, const Formula& r) {
  if (l.is_false() || r.is_true()) return Formula::True();
  if (l.is_true()) return r;
  if (r.is_false()) return make_not(l);
  if (l == r) return Formula::True();
  return Formula::Implies(l, r);
}

}  // namespace

Formula canonicalize(const Formula& f) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
      return f;
    case Kind::Not:
      return make_not(canonicalize(f.left()));
    case Kind::And:
      return make_and({canonicalize(f.left()), canonicalize(f.right())});
    case Kind::Or:
      return make_or({canonicalize(f.left()), canonicalize(f.right())});
    case Kind::Implies:
      return make_implies(canonicalize(f.left()), canonicalize(f.right()));
    case Kind::Next:
      return make_next(canonicalize(f.left()));
    case Kind::Until:
      return make_until(canonicalize(f.left()), canonicalize(f.right()));
    case Kind::Eventually:
      return make_eventually(canonicalize(f.left()));
    case Kind::Always:
      return make_always(canonicalize(f.left()));
  }
  throw std::logic_error("canonicalize: unhandled kind");
}

namespace {

// Raw progression rules; canonicalization happens once at the top.
Formula progress_raw(const Formula& f, const TruthAssignment& sigma) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
      return f;
    case Kind::Atom:
      return sigma.count(f.name()) ? Formula::True() : Formula::False();
    case Kind::Not:
      return Formula::Not(progress_raw(f.left(), sigma));
    case Kind::And:
      return Formula::And(progress_raw(f.left(), sigma), progress_raw(f.right(), sigma));
    case Kind::Or:
      return Formula::Or(progress_raw(f.left(), sigma), progress_raw(f.right(), sigma));
    case Kind::Implies:
      return Formula::Implies(progress_raw(f.left(), sigma),
                              progress_raw(f.right(), sigma));
    case Kind::Next:
      return f.left();
    case Kind::Until:
      // prog(l U r) = prog(r) | (prog(l) & (l U r))
      return Formula::Or(progress_raw(f.right(), sigma),
                         Formula::And(progress_raw(f.left(), sigma), f));
    case Kind::Eventually:
      // F c = true U c
      return Formula::Or(progress_raw(f.left(), sigma), f);
    case Kind::Always:
      // G c = !F!c
      return Formula::And(progress_raw(f.left(), sigma), f);
  }
  throw std::logic_error("progress: unhandled kind");
}

}  // namespace

Formula progress(const Formula& f, const TruthAssignment& sigma) {
  return canonicalize(progress_raw(f, sigma));
}

std::vector<Formula> progression_closure(const std::vector<Formula>& tasks) {
  if (tasks.empty()) {
    throw InvalidArgumentError("progression_closure: task set must be non-empty");
  }
  constexpr std::size_t kClosureLimit = 100000;

  std::map<std::string, Formula> closed;
  std::vector<Formula> worklist;
  for (const auto& t : tasks) worklist.push_back(canonicalize(t));

  while (!worklist.empty()) {
    Formula f = worklist.back();
    worklist.pop_back();
    if (f.is_constant()) continue;
    if (!closed.emplace(to_string(f), f).second) continue;
    if (closed.size() > kClosureLimit) {
      throw std::runtime_error("progression_closure: form count exceeds limit");
    }

    const std::set<std::string> props = propositions(f);
    const std::vector<std::string> atom_list(props.begin(), props.end());
    const std::size_t n = atom_list.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      TruthAssignment sigma;
      for (std::size_t b = 0; b < n; ++b) {
        if (mask & (std::size_t{1} << b)) sigma.insert(atom_list[b]);
      }
      Formula g = progress(f, sigma);
      if (!g.is_constant() && !closed.count(to_string(g))) worklist.push_back(g);
    }
  }

  std::vector<Formula> result;
  for (const auto& [key, formula] : closed) result.push_back(formula);
  return result;
}

}  // namespace auxrl::ltl
