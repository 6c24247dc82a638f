#include "auxrl/ltl/semantics.hpp"

#include <vector>

#include "auxrl/util/errors.hpp"

namespace auxrl::ltl {

namespace {

enum class Tri : unsigned char { False, True, Unknown };

Tri tri_not(Tri a) {
  if (a == Tri::Unknown) return Tri::Unknown;
  return a == Tri::True ? Tri::False : Tri::True;
}

Tri tri_and(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::True && b == Tri::True) return Tri::True;
  return Tri::Unknown;
}

Tri tri_or(Tri a, Tri b) {
  if (a == Tri::True || b == Tri::True) return Tri::True;
  if (a == Tri::False && b == Tri::False) return Tri::False;
  return Tri::Unknown;
}

// Polarity scan: Always must not occur positively, Eventually/Until must not
// occur negatively, otherwise no finite prefix can confirm satisfaction.
bool cosafe_scan(const Formula& f, bool positive) {
  switch (f.kind()) {
    case Kind::True:
    case Kind::False:
    case Kind::Atom:
      return true;
    case Kind::Not:
      return cosafe_scan(f.left(), !positive);
    case Kind::Implies:
      return cosafe_scan(f.left(), !positive) && cosafe_scan(f.right(), positive);
    case Kind::And:
    case Kind::Or:
      return cosafe_scan(f.left(), positive) && cosafe_scan(f.right(), positive);
    case Kind::Next:
      return cosafe_scan(f.left(), positive);
    case Kind::Until:
      if (!positive) return false;
      return cosafe_scan(f.left(), positive) && cosafe_scan(f.right(), positive);
    case Kind::Eventually:
      if (!positive) return false;
      return cosafe_scan(f.left(), positive);
    case Kind::Always:
      if (positive) return false;
      return cosafe_scan(f.left(), positive);
  }
  return false;
}

// Flat representation for the per-position dynamic program.
struct FlatNode {
  Kind kind;
  std::string name;   // Atom
  int left = -1;
  int right = -1;
};

int flatten_into(const Formula& f, std::vector<FlatNode>& out) {
  FlatNode n;
  n.kind = f.kind();
  if (f.kind() == Kind::Atom) {
    n.name = f.name();
  } else if (f.has_children()) {
    n.left = flatten_into(f.left(), out);
    if (f.is_binary()) n.right = flatten_into(f.right(), out);
  }
  out.push_back(std::move(n));
  return static_cast<int>(out.size() - 1);
}

// Value of each subformula at the boundary position (one past the prefix),
// where atom truth is unknown.
std::vector<Tri> boundary_fold(const std::vector<FlatNode>& nodes) {
  std::vector<Tri> v(nodes.size(), Tri::Unknown);
  for (std::size_t i = 0; i < nodes.size(); ++i) {  // children precede parents
    const FlatNode& n = nodes[i];
    switch (n.kind) {
      case Kind::True: v[i] = Tri::True; break;
      case Kind::False: v[i] = Tri::False; break;
      case Kind::Atom: v[i] = Tri::Unknown; break;
      case Kind::Not: v[i] = tri_not(v[n.left]); break;
      case Kind::And: v[i] = tri_and(v[n.left], v[n.right]); break;
      case Kind::Or: v[i] = tri_or(v[n.left], v[n.right]); break;
      case Kind::Implies: v[i] = tri_or(tri_not(v[n.left]), v[n.right]); break;
      case Kind::Next:
      case Kind::Eventually:
      case Kind::Always:
        v[i] = v[n.left];
        break;
      case Kind::Until:
        v[i] = v[n.right];
        break;
    }
  }
  return v;
}

// Evaluates every subformula at every position of trace[0..len) by backward
// induction from the boundary.
Tri eval_prefix(const std::vector<FlatNode>& nodes, const Trace& trace,
                std::size_t len) {
  std::vector<Tri> next = boundary_fold(nodes);  // position len
  std::vector<Tri> cur(nodes.size(), Tri::Unknown);
  for (std::size_t pos = len; pos-- > 0;) {
    const TruthAssignment& sigma = trace[pos];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const FlatNode& n = nodes[i];
      switch (n.kind) {
        case Kind::True: cur[i] = Tri::True; break;
        case Kind::False: cur[i] = Tri::False; break;
        case Kind::Atom:
          cur[i] = sigma.count(n.name) ? Tri::True : Tri::False;
          break;
        case Kind::Not: cur[i] = tri_not(cur[n.left]); break;
        case Kind::And: cur[i] = tri_and(cur[n.left], cur[n.right]); break;
        case Kind::Or: cur[i] = tri_or(cur[n.left], cur[n.right]); break;
        case Kind::Implies:
          cur[i] = tri_or(tri_not(cur[n.left]), cur[n.right]);
          break;
        case Kind::Next: cur[i] = next[n.left]; break;
        case Kind::Eventually:
          cur[i] = tri_or(cur[n.left], next[i]);
          break;
        case Kind::Always:
          cur[i] = tri_and(cur[n.left], next[i]);
          break;
        case Kind::Until:
          cur[i] = tri_or(cur[n.right], tri_and(cur[n.left], next[i]));
          break;
      }
    }
    next = cur;
  }
  return next.back();  // root is last in post-order
}

}  // namespace

bool is_cosafe(const Formula& f) { return cosafe_scan(f, true); }

SatisfactionResult satisfies(const Trace& trace, const Formula& f) {
  if (trace.empty()) throw InvalidArgumentError("satisfies: trace must be non-empty");
  if (!is_cosafe(f)) {
    throw UnsupportedFragmentError(
        "satisfies: finite-prefix satisfaction undefined for '" + to_string(f) + "'");
  }
  std::vector<FlatNode> nodes;
  flatten_into(f, nodes);
  for (std::size_t n = 1; n <= trace.size(); ++n) {
    if (eval_prefix(nodes, trace, n) == Tri::True) {
      return SatisfactionResult{true, n - 1};
    }
  }
  return SatisfactionResult{false, std::nullopt};
}

}  // namespace auxrl::ltl
