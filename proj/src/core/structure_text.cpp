#include "lam/formula.hpp"
#include "lexer.hpp"

namespace lam {

using detail::Lexer;
using detail::Tok;

namespace {

// structure := '{' ids? ('|' (condition (',' condition)*)?)? '}'
// condition := 'not' structure | structure '=>' structure | name ('(' ids? ')')?
class StructureParser {
public:
  explicit StructureParser(std::string_view text) : lex_(text) {}

  Structure parse() {
    Structure s = structure();
    expect(Tok::End, "expected end of input");
    return s;
  }

private:
  Structure structure() {
    expect(Tok::LBrace, "expected '{'");
    std::vector<ReferentId> universe;
    std::vector<Condition> conditions;
    if (lex_.peek().kind == Tok::Ident) universe = ids();
    if (lex_.peek().kind == Tok::Pipe) {
      lex_.take();
      if (lex_.peek().kind != Tok::RBrace) conditions.push_back(condition());
      while (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        conditions.push_back(condition());
      }
    }
    expect(Tok::RBrace, "expected ',', '|' or '}'");
    return Structure(std::move(universe), std::move(conditions));
  }

  std::vector<ReferentId> ids() {
    std::vector<ReferentId> out;
    out.push_back(expect(Tok::Ident, "expected referent").text);
    while (lex_.peek().kind == Tok::Comma) {
      lex_.take();
      out.push_back(expect(Tok::Ident, "expected referent").text);
    }
    return out;
  }

  Condition condition() {
    switch (lex_.peek().kind) {
      case Tok::Not:
        lex_.take();
        return Condition::negation(structure());
      case Tok::LBrace: {
        Structure antecedent = structure();
        expect(Tok::Arrow, "expected '=>' after antecedent structure");
        return Condition::implies(std::move(antecedent), structure());
      }
      case Tok::Ident: {
        std::string name = lex_.take().text;
        std::vector<ReferentId> args;
        if (lex_.peek().kind == Tok::LParen) {
          lex_.take();
          if (lex_.peek().kind == Tok::Ident) args = ids();
          expect(Tok::RParen, "expected ',' or ')'");
        }
        return Condition::atom(std::move(name), std::move(args));
      }
      default:
        throw ParseError(lex_.peek().span, std::string("expected condition, found ") +
                                               detail::describe(lex_.peek().kind));
    }
  }

  detail::Token expect(Tok kind, const char* message) {
    if (lex_.peek().kind != kind) {
      throw ParseError(lex_.peek().span,
                       std::string(message) + ", found " + detail::describe(lex_.peek().kind));
    }
    return lex_.take();
  }

  Lexer lex_;
};

void write(const Structure& s, std::string& out);

void write(const Condition& c, std::string& out) {
  switch (c.kind) {
    case Condition::Kind::Atom:
      out += c.predicate;
      out += '(';
      for (std::size_t i = 0; i < c.args.size(); ++i) {
        if (i) out += ',';
        out += c.args[i];
      }
      out += ')';
      return;
    case Condition::Kind::Not:
      out += "not ";
      write(c.inner(), out);
      return;
    case Condition::Kind::Implies:
      write(c.antecedent(), out);
      out += " => ";
      write(c.consequent(), out);
      return;
  }
}

void write(const Structure& s, std::string& out) {
  out += '{';
  for (std::size_t i = 0; i < s.universe.size(); ++i) {
    if (i) out += ',';
    out += s.universe[i];
  }
  if (!s.conditions.empty()) {
    out += s.universe.empty() ? "| " : " | ";
    for (std::size_t i = 0; i < s.conditions.size(); ++i) {
      if (i) out += ", ";
      write(s.conditions[i], out);
    }
  }
  out += '}';
}

}  // namespace

Structure parse_structure(std::string_view text) {
  Structure s = StructureParser(text).parse();
  validate(s);
  return s;
}

std::string serialize_structure(const Structure& s) {
  std::string out;
  write(s, out);
  return out;
}

}  // namespace lam
