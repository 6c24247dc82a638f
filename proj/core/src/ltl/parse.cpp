#include "auxrl/ltl/parse.hpp"

#include <cctype>
#include <optional>
#include <vector>

namespace auxrl::ltl {

namespace {

enum class Tok { Ident, LParen, RParen, AndOp, OrOp, NotOp, ImpliesOp, End };

struct Token {
  Tok kind;
  std::string text;   // Ident only
  std::size_t pos;    // byte offset in the input
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { scan_all(); }

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = index_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }

  Token next() {
    const Token& t = peek();
    if (t.kind != Tok::End) ++index_;
    return t;
  }

 private:
  void scan_all() {
    std::size_t i = 0;
    while (i < text_.size()) {
      const char c = text_[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (c == '(') { tokens_.push_back({Tok::LParen, {}, i}); ++i; continue; }
      if (c == ')') { tokens_.push_back({Tok::RParen, {}, i}); ++i; continue; }
      if (c == '&') { tokens_.push_back({Tok::AndOp, {}, i}); ++i; continue; }
      if (c == '|') { tokens_.push_back({Tok::OrOp, {}, i}); ++i; continue; }
      if (c == '!') { tokens_.push_back({Tok::NotOp, {}, i}); ++i; continue; }
      if (c == '-') {
        if (i + 1 < text_.size() && text_[i + 1] == '>') {
          tokens_.push_back({Tok::ImpliesOp, {}, i});
          i += 2;
          continue;
        }
        throw ParseError("expected '->'", i);
      }
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i + 1;
        while (j < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_')) {
          ++j;
        }
        tokens_.push_back({Tok::Ident, std::string(text_.substr(i, j - i)), i});
        i = j;
        continue;
      }
      throw ParseError("unexpected character '" + std::string(1, c) + "'", i);
    }
    tokens_.push_back({Tok::End, {}, text_.size()});
  }

  std::string_view text_;
  std::vector<Token> tokens_;
  std::size_t index_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) {}

  Formula run() {
    Formula f = parse_implies();
    const Token& t = lex_.peek();
    if (t.kind != Tok::End) throw ParseError("unexpected trailing input", t.pos);
    return f;
  }

 private:
  // True when the token could begin an operand, which is how a leading
  // X/F/G identifier is told apart from an atom of the same name.
  static bool starts_operand(const Token& t) {
    switch (t.kind) {
      case Tok::Ident:
      case Tok::LParen:
      case Tok::NotOp:
        return true;
      default:
        return false;
    }
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (lex_.peek().kind == Tok::ImpliesOp) {
      lex_.next();
      return Formula::Implies(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (lex_.peek().kind == Tok::OrOp) {
      lex_.next();
      f = Formula::Or(std::move(f), parse_and());
    }
    return f;
  }

  Formula parse_and() {
    Formula f = parse_until();
    while (lex_.peek().kind == Tok::AndOp) {
      lex_.next();
      f = Formula::And(std::move(f), parse_until());
    }
    return f;
  }

  Formula parse_until() {
    Formula lhs = parse_unary();
    const Token& t = lex_.peek();
    if (t.kind == Tok::Ident && t.text == "U" && starts_operand(lex_.peek(1))) {
      lex_.next();
      return Formula::Until(std::move(lhs), parse_until());
    }
    return lhs;
  }

  Formula parse_unary() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::NotOp) {
      lex_.next();
      return Formula::Not(parse_unary());
    }
    if (t.kind == Tok::Ident && t.text.size() == 1 && starts_operand(lex_.peek(1))) {
      switch (t.text[0]) {
        case 'X': lex_.next(); return Formula::Next(parse_unary());
        case 'F': lex_.next(); return Formula::Eventually(parse_unary());
        case 'G': lex_.next(); return Formula::Always(parse_unary());
        default: break;
      }
    }
    return parse_primary();
  }

  Formula parse_primary() {
    const Token t = lex_.next();
    switch (t.kind) {
      case Tok::LParen: {
        Formula f = parse_implies();
        const Token close = lex_.next();
        if (close.kind != Tok::RParen) throw ParseError("expected ')'", close.pos);
        return f;
      }
      case Tok::Ident:
        if (t.text == "true") return Formula::True();
        if (t.text == "false") return Formula::False();
        if (t.text == "U") throw ParseError("'U' is not a valid atom", t.pos);
        return Formula::Atom(t.text);
      case Tok::End:
        throw ParseError("unexpected end of input", t.pos);
      default:
        throw ParseError("expected a formula", t.pos);
    }
  }

  Lexer lex_;
};

}  // namespace

Formula parse(std::string_view text) { return Parser(text).run(); }

}  // namespace auxrl::ltl
