#pragma once

// Finite discourse structures (universe of referents, set of conditions),
// embeddings between them and satisfaction with negation read as the absence
// of an extending embedding.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lam {

using ReferentId = std::string;

struct Structure;

struct Condition {
  enum class Kind { Atom, Not, Implies };

  Kind kind = Kind::Atom;
  std::string predicate;          // Atom only
  std::vector<ReferentId> args;   // Atom only
  std::vector<Structure> parts;   // Not: {inner}; Implies: {antecedent, consequent}

  static Condition atom(std::string predicate, std::vector<ReferentId> args);
  static Condition negation(Structure inner);
  static Condition implies(Structure antecedent, Structure consequent);

  const Structure& inner() const { return parts.at(0); }
  const Structure& antecedent() const { return parts.at(0); }
  const Structure& consequent() const { return parts.at(1); }

  friend bool operator==(const Condition& a, const Condition& b);
  friend bool operator<(const Condition& a, const Condition& b);
};

// Universe and conditions are kept sorted and duplicate-free, so structural
// equality is set equality.
struct Structure {
  std::vector<ReferentId> universe;
  std::vector<Condition> conditions;

  Structure() = default;
  Structure(std::vector<ReferentId> universe, std::vector<Condition> conditions);

  bool declares(const ReferentId& id) const;

  friend bool operator==(const Structure& a, const Structure& b);
  friend bool operator<(const Structure& a, const Structure& b);
};

// Total map from a source universe into a target universe.
using Embedding = std::map<ReferentId, ReferentId>;

struct SearchLimits {
  std::uint64_t max_maps = 1'000'000;
};

// Throws InvalidArgument when an Atom argument is declared neither in its own
// structure nor in a superordinate one.
void validate(const Structure& s);

// Union of universes and of conditions; equal ids denote the same referent.
Structure merge(const Structure& a, const Structure& b);

// A ⪯ T: every referent and every condition of A also occurs in T.
bool is_continuation(const Structure& a, const Structure& t);

Embedding identity_map(const Structure& s);

// Direct re-verification: f is total on source's universe and every condition
// of source holds in target under f.
bool embeds_under(const Structure& source, const Structure& target, const Embedding& f,
                  SearchLimits limits = {});

// First condition-preserving map in lexicographic order of referent ids, or
// nullopt. Throws CapExceeded when a search step exceeds limits.max_maps.
std::optional<Embedding> find_embedding(const Structure& source, const Structure& target,
                                        SearchLimits limits = {});

// True iff some extension of base over phi's universe makes every condition of
// phi hold in the verifier. A Not condition holds iff no extension embeds its
// inner structure; Implies(A, B) holds iff every extension embedding A extends
// further to one embedding B.
bool check_satisfaction(const Structure& phi, const Structure& verifier, const Embedding& base = {},
                        SearchLimits limits = {});

// The pair (P, C') with C = P + C'.
struct ScopedContext {
  Structure presupposed;
  Structure scoped;
  Structure full;

  static ScopedContext from_parts(Structure presupposed, Structure scoped);
};

}  // namespace lam
