#pragma once

// Propositional formulas over atomic contents: atoms, `not`, sequencing `.`
// and `=>`. Nodes are immutable and shared, so copies are cheap.

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lam/error.hpp"
#include "lam/structure.hpp"

namespace lam {

class Formula {
public:
  enum class Kind { Atom, Not, Seq, Implies };

  static Formula atom(std::string id);
  static Formula negation(Formula inner);
  static Formula seq(Formula first, Formula second);
  static Formula implies(Formula antecedent, Formula consequent);

  Kind kind() const { return node_->kind; }
  bool is_atom() const { return kind() == Kind::Atom; }
  const std::string& id() const { return node_->id; }
  // Not: inner is left(); Seq/Implies: left() then right().
  const Formula& left() const { return node_->children.at(0); }
  const Formula& right() const { return node_->children.at(1); }

  // Atom ids in first-occurrence order.
  std::vector<std::string> atoms() const;
  std::size_t size() const;
  std::size_t depth() const;

  friend bool operator==(const Formula& a, const Formula& b);

private:
  struct Node {
    Kind kind;
    std::string id;
    std::vector<Formula> children;
  };
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// formula := implication
// implication := sequence ('=>' implication)?      right associative, loosest
// sequence := unary ('.' unary)*                    left associative
// unary := ('not' | '¬') unary | atom | '(' formula ')'
// `⇒` is accepted for `=>`. Throws ParseError carrying the offending span.
Formula parse_formula(std::string_view text);

// Canonical form with the fewest parentheses the grammar needs.
std::string serialize_formula(const Formula& f);

// Structure literals: `{x,y | car(x), red(x), likes(x,y)}`. Conditions may
// also be `not {...}` and `{...} => {...}`. The parsed structure is validated
// against the referent-declaration rule.
Structure parse_structure(std::string_view text);
std::string serialize_structure(const Structure& s);

}  // namespace lam
