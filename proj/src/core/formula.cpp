#include "lam/formula.hpp"

#include <algorithm>
#include <functional>

#include "lexer.hpp"

namespace lam {

using detail::Lexer;
using detail::Tok;

Formula Formula::atom(std::string id) {
  if (id.empty()) throw Error(ErrorCode::InvalidArgument, "atom id must be nonempty");
  return Formula(std::make_shared<const Node>(Node{Kind::Atom, std::move(id), {}}));
}

Formula Formula::negation(Formula inner) {
  return Formula(std::make_shared<const Node>(Node{Kind::Not, {}, {std::move(inner)}}));
}

Formula Formula::seq(Formula first, Formula second) {
  return Formula(
      std::make_shared<const Node>(Node{Kind::Seq, {}, {std::move(first), std::move(second)}}));
}

Formula Formula::implies(Formula antecedent, Formula consequent) {
  return Formula(std::make_shared<const Node>(
      Node{Kind::Implies, {}, {std::move(antecedent), std::move(consequent)}}));
}

std::vector<std::string> Formula::atoms() const {
  std::vector<std::string> out;
  std::function<void(const Formula&)> walk = [&](const Formula& f) {
    if (f.is_atom()) {
      if (std::find(out.begin(), out.end(), f.id()) == out.end()) out.push_back(f.id());
      return;
    }
    for (const auto& c : f.node_->children) walk(c);
  };
  walk(*this);
  return out;
}

std::size_t Formula::size() const {
  std::size_t n = 1;
  for (const auto& c : node_->children) n += c.size();
  return n;
}

std::size_t Formula::depth() const {
  std::size_t d = 0;
  for (const auto& c : node_->children) d = std::max(d, c.depth());
  return d + 1;
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  if (a.is_atom()) return a.id() == b.id();
  return a.node_->children == b.node_->children;
}

namespace {

class FormulaParser {
public:
  explicit FormulaParser(std::string_view text) : lex_(text) {}

  Formula parse() {
    if (lex_.peek().kind == Tok::End)
      throw ParseError(lex_.peek().span, "expected formula, found end of input");
    Formula f = implication();
    expect(Tok::End, "expected '.', '=>' or end of input");
    return f;
  }

private:
  Formula implication() {
    Formula lhs = sequence();
    if (lex_.peek().kind == Tok::Arrow) {
      lex_.take();
      return Formula::implies(std::move(lhs), implication());
    }
    return lhs;
  }

  Formula sequence() {
    Formula lhs = unary();
    while (lex_.peek().kind == Tok::Dot) {
      lex_.take();
      lhs = Formula::seq(std::move(lhs), unary());
    }
    return lhs;
  }

  Formula unary() {
    const auto& t = lex_.peek();
    switch (t.kind) {
      case Tok::Not:
        lex_.take();
        return Formula::negation(unary());
      case Tok::Ident:
        return Formula::atom(lex_.take().text);
      case Tok::LParen: {
        lex_.take();
        Formula inner = implication();
        expect(Tok::RParen, "expected ')'");
        return inner;
      }
      default:
        throw ParseError(t.span, std::string("expected atom, 'not' or '(', found ") +
                                     detail::describe(t.kind));
    }
  }

  void expect(Tok kind, const char* message) {
    if (lex_.peek().kind != kind) {
      throw ParseError(lex_.peek().span,
                       std::string(message) + ", found " + detail::describe(lex_.peek().kind));
    }
    lex_.take();
  }

  Lexer lex_;
};

// Binding strength: Implies 1, Seq 2, Not/Atom 3.
int level(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Implies: return 1;
    case Formula::Kind::Seq: return 2;
    default: return 3;
  }
}

void write(const Formula& f, std::string& out);

void write_operand(const Formula& f, bool parens, std::string& out) {
  if (parens) out += '(';
  write(f, out);
  if (parens) out += ')';
}

void write(const Formula& f, std::string& out) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      out += f.id();
      return;
    case Formula::Kind::Not:
      out += "not ";
      write_operand(f.left(), level(f.left()) < 3, out);
      return;
    case Formula::Kind::Seq:
      write_operand(f.left(), level(f.left()) < 2, out);
      out += " . ";
      write_operand(f.right(), level(f.right()) <= 2, out);
      return;
    case Formula::Kind::Implies:
      write_operand(f.left(), level(f.left()) <= 1, out);
      out += " => ";
      write_operand(f.right(), level(f.right()) < 1, out);
      return;
  }
}

}  // namespace

Formula parse_formula(std::string_view text) { return FormulaParser(text).parse(); }

std::string serialize_formula(const Formula& f) {
  std::string out;
  write(f, out);
  return out;
}

}  // namespace lam
