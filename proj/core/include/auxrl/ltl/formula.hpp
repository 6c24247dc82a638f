#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace auxrl::ltl {

enum class Kind {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Next,
  Until,
  Eventually,
  Always,
};

/// Immutable LTL syntax tree with value semantics. Nodes are shared, never
/// mutated, so formulas are cheap to copy and safe to hand across threads.
class Formula {
 public:
  /// Default-constructs the constant `true`.
  Formula();

  static Formula True();
  static Formula False();
  static Formula Atom(std::string name);
  static Formula Not(Formula f);
  static Formula And(Formula l, Formula r);
  static Formula Or(Formula l, Formula r);
  static Formula Implies(Formula l, Formula r);
  static Formula Next(Formula f);
  static Formula Until(Formula l, Formula r);
  static Formula Eventually(Formula f);
  static Formula Always(Formula f);

  Kind kind() const { return node_->kind; }
  bool is_true() const { return kind() == Kind::True; }
  bool is_false() const { return kind() == Kind::False; }
  bool is_constant() const { return is_true() || is_false(); }

  /// Atom identifier; valid only for Kind::Atom.
  const std::string& name() const;

  /// Child accessors. Unary operators store their operand in left().
  Formula left() const;
  Formula right() const;

  bool has_children() const { return node_->left != nullptr; }
  bool is_unary() const;
  bool is_binary() const;

  /// Structural equality.
  bool operator==(const Formula& other) const;
  bool operator!=(const Formula& other) const { return !(*this == other); }

 private:
  struct Node {
    Kind kind;
    std::string name;                    // Atom only
    std::shared_ptr<const Node> left;    // unary child or binary lhs
    std::shared_ptr<const Node> right;   // binary rhs
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static bool node_equal(const Node* a, const Node* b);

  std::shared_ptr<const Node> node_;
};

/// Deterministic rendering. Binary operators are fully parenthesised, so
/// parse(to_string(f)) always reproduces f node for node; this string is the
/// stable serialization used in every output file and as the Q-bank key.
std::string to_string(const Formula& f);

/// Exactly the atom identifiers occurring in f.
std::set<std::string> propositions(const Formula& f);

/// Number of AST nodes.
std::size_t node_count(const Formula& f);

/// Abstract syntax graph: one vertex per AST node, edges from parent
/// operators to their subformulas, vertices in depth-first preorder.
struct AstGraph {
  struct Node {
    std::string label;        // operator symbol or proposition identifier
    bool is_proposition = false;
  };
  std::vector<Node> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // parent -> child
};

AstGraph ast_graph(const Formula& f);

/// Total order on formulas via the rendered string (used for canonical
/// operand ordering and deterministic container iteration).
struct FormulaOrder {
  bool operator()(const Formula& a, const Formula& b) const {
    return to_string(a) < to_string(b);
  }
};

}  // namespace auxrl::ltl
