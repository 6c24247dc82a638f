#include "auxrl/ltl/formula.hpp"

#include <stdexcept>

namespace auxrl::ltl {

namespace {

const char* unary_symbol(Kind k) {
  switch (k) {
    case Kind::Not: return "!";
    case Kind::Next: return "X";
    case Kind::Eventually: return "F";
    case Kind::Always: return "G";
    default: return nullptr;
  }
}

const char* binary_symbol(Kind k) {
  switch (k) {
    case Kind::And: return "&";
    case Kind::Or: return "|";
    case Kind::Implies: return "->";
    case Kind::Until: return "U";
    default: return nullptr;
  }
}

}  // namespace

Formula::Formula() : node_(std::make_shared<Node>(Node{Kind::True, {}, nullptr, nullptr})) {}

Formula Formula::True() { return Formula{}; }

Formula Formula::False() {
  return Formula(std::make_shared<Node>(Node{Kind::False, {}, nullptr, nullptr}));
}

Formula Formula::Atom(std::string name) {
  if (name.empty()) throw std::invalid_argument("Formula::Atom: empty identifier");
  return Formula(std::make_shared<Node>(Node{Kind::Atom, std::move(name), nullptr, nullptr}));
}

Formula Formula::Not(Formula f) {
  return Formula(std::make_shared<Node>(Node{Kind::Not, {}, f.node_, nullptr}));
}

Formula Formula::And(Formula l, Formula r) {
  return Formula(std::make_shared<Node>(Node{Kind::And, {}, l.node_, r.node_}));
}

Formula Formula::Or(Formula l, Formula r) {
  return Formula(std::make_shared<Node>(Node{Kind::Or, {}, l.node_, r.node_}));
}

Formula Formula::Implies(Formula l, Formula r) {
  return Formula(std::make_shared<Node>(Node{Kind::Implies, {}, l.node_, r.node_}));
}

Formula Formula::Next(Formula f) {
  return Formula(std::make_shared<Node>(Node{Kind::Next, {}, f.node_, nullptr}));
}

Formula Formula::Until(Formula l, Formula r) {
  return Formula(std::make_shared<Node>(Node{Kind::Until, {}, l.node_, r.node_}));
}

Formula Formula::Eventually(Formula f) {
  return Formula(std::make_shared<Node>(Node{Kind::Eventually, {}, f.node_, nullptr}));
}

Formula Formula::Always(Formula f) {
  return Formula(std::make_shared<Node>(Node{Kind::Always, {}, f.node_, nullptr}));
}

const std::string& Formula::name() const {
  if (kind() != Kind::Atom) throw std::logic_error("Formula::name: not an atom");
  return node_->name;
}

Formula Formula::left() const {
  if (!node_->left) throw std::logic_error("Formula::left: leaf node");
  return Formula(node_->left);
}

Formula Formula::right() const {
  if (!node_->right) throw std::logic_error("Formula::right: no right child");
  return Formula(node_->right);
}

bool Formula::is_unary() const { return unary_symbol(kind()) != nullptr; }
bool Formula::is_binary() const { return binary_symbol(kind()) != nullptr; }

bool Formula::node_equal(const Node* a, const Node* b) {
  if (a == b) return true;
  if (a == nullptr || b == nullptr) return false;
  if (a->kind != b->kind) return false;
  if (a->kind == Kind::Atom) return a->name == b->name;
  return node_equal(a->left.get(), b->left.get()) &&
         node_equal(a->right.get(), b->right.get());
}

bool Formula::operator==(const Formula& other) const {
  return node_equal(node_.get(), other.node_.get());
}

namespace {

void render(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Kind::True: out += "true"; return;
    case Kind::False: out += "false"; return;
    case Kind::Atom: out += f.name(); return;
    case Kind::Not:
      out += '!';
      render(f.left(), out);
      return;
    case Kind::Next:
    case Kind::Eventually:
    case Kind::Always:
      out += unary_symbol(f.kind());
      out += ' ';
      render(f.left(), out);
      return;
    default:
      out += '(';
      render(f.left(), out);
      out += ' ';
      out += binary_symbol(f.kind());
      out += ' ';
      render(f.right(), out);
      out += ')';
      return;
  }
}

}  // namespace

std::string to_string(const Formula& f) {
  std::string out;
  render(f, out);
  return out;
}

std::set<std::string> propositions(const Formula& f) {
  std::set<std::string> atoms;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula cur = stack.back();
    stack.pop_back();
    if (cur.kind() == Kind::Atom) {
      atoms.insert(cur.name());
    } else if (cur.has_children()) {
      stack.push_back(cur.left());
      if (cur.is_binary()) stack.push_back(cur.right());
    }
  }
  return atoms;
}

std::size_t node_count(const Formula& f) {
  if (f.kind() == Kind::Atom || f.is_constant()) return 1;
  if (f.is_binary()) return 1 + node_count(f.left()) + node_count(f.right());
  return 1 + node_count(f.left());
}

namespace {

std::size_t build_graph(const Formula& f, AstGraph& g) {
  const std::size_t id = g.nodes.size();
  AstGraph::Node node;
  switch (f.kind()) {
    case Kind::True: node.label = "true"; break;
    case Kind::False: node.label = "false"; break;
    case Kind::Atom:
      node.label = f.name();
      node.is_proposition = true;
      break;
    default:
      node.label = f.is_unary() ? unary_symbol(f.kind()) : binary_symbol(f.kind());
      break;
  }
  g.nodes.push_back(std::move(node));
  if (f.kind() == Kind::Atom || f.is_constant()) return id;
  const std::size_t lhs = build_graph(f.left(), g);
  g.edges.emplace_back(id, lhs);
  if (f.is_binary()) {
    const std::size_t rhs = build_graph(f.right(), g);
    g.edges.emplace_back(id, rhs);
  }
  return id;
}

}  // namespace

AstGraph ast_graph(const Formula& f) {
  AstGraph g;
  build_graph(f, g);
  return g;
}

}  // namespace auxrl::ltl
