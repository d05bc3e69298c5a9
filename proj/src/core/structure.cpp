#include "lam/structure.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "lam/error.hpp"

namespace lam {

namespace {

template <typename T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

int compare_structures(const Structure& a, const Structure& b);

int compare_conditions(const Condition& a, const Condition& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.kind == Condition::Kind::Atom) {
    if (int c = a.predicate.compare(b.predicate); c != 0) return c < 0 ? -1 : 1;
    if (a.args != b.args) return a.args < b.args ? -1 : 1;
    return 0;
  }
  for (std::size_t i = 0; i < a.parts.size() && i < b.parts.size(); ++i) {
    if (int c = compare_structures(a.parts[i], b.parts[i]); c != 0) return c;
  }
  if (a.parts.size() != b.parts.size()) return a.parts.size() < b.parts.size() ? -1 : 1;
  return 0;
}

int compare_structures(const Structure& a, const Structure& b) {
  if (a.universe != b.universe) return a.universe < b.universe ? -1 : 1;
  const auto n = std::min(a.conditions.size(), b.conditions.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare_conditions(a.conditions[i], b.conditions[i]); c != 0) return c;
  }
  if (a.conditions.size() != b.conditions.size())
    return a.conditions.size() < b.conditions.size() ? -1 : 1;
  return 0;
}

void validate_in(const Structure& s, std::vector<const Structure*>& scopes) {
  scopes.push_back(&s);
  for (const auto& c : s.conditions) {
    if (c.kind == Condition::Kind::Atom) {
      for (const auto& arg : c.args) {
        bool found = std::any_of(scopes.begin(), scopes.end(),
                                 [&](const Structure* scope) { return scope->declares(arg); });
        if (!found)
          throw Error(ErrorCode::InvalidArgument,
                      "undeclared referent '" + arg + "' in " + c.predicate + "(...)");
      }
    } else if (c.kind == Condition::Kind::Not) {
      validate_in(c.inner(), scopes);
    } else {
      // The consequent sees the antecedent's referents.
      validate_in(c.antecedent(), scopes);
      scopes.push_back(&c.antecedent());
      validate_in(c.consequent(), scopes);
      scopes.pop_back();
    }
  }
  scopes.pop_back();
}

using AtomKey = std::pair<std::string, std::vector<ReferentId>>;

// Search state for one verifier: its atom table plus the cap.
class Searcher {
public:
  Searcher(const Structure& verifier, SearchLimits limits) : verifier_(verifier), limits_(limits) {
    for (const auto& c : verifier.conditions) {
      if (c.kind == Condition::Kind::Atom) atoms_.emplace(c.predicate, c.args);
    }
  }

  // Calls visit(g) for each extension g ⊇ base over s.universe that satisfies
  // every condition of s, in lexicographic order; stops when visit returns false.
  template <typename Visit>
  void for_each_extension(const Structure& s, const Embedding& base, Visit&& visit) const {
    std::vector<ReferentId> fresh;
    for (const auto& id : s.universe) {
      if (!base.contains(id)) fresh.push_back(id);
    }
    const auto& targets = verifier_.universe;
    check_cap(targets.size(), fresh.size());
    if (!fresh.empty() && targets.empty()) return;

    Embedding g = base;
    std::vector<std::size_t> digits(fresh.size(), 0);
    for (;;) {
      for (std::size_t i = 0; i < fresh.size(); ++i) g[fresh[i]] = targets[digits[i]];
      if (all_hold(s, g) && !visit(static_cast<const Embedding&>(g))) return;
      // Advance the odometer, least significant digit last.
      std::size_t pos = fresh.size();
      while (pos > 0) {
        --pos;
        if (++digits[pos] < targets.size()) break;
        digits[pos] = 0;
        if (pos == 0) return;
      }
      if (fresh.empty()) return;
    }
  }

  bool exists_extension(const Structure& s, const Embedding& base) const {
    bool found = false;
    for_each_extension(s, base, [&](const Embedding&) {
      found = true;
      return false;
    });
    return found;
  }

  bool holds(const Condition& c, const Embedding& g) const {
    switch (c.kind) {
      case Condition::Kind::Atom: {
        AtomKey key{c.predicate, {}};
        key.second.reserve(c.args.size());
        for (const auto& arg : c.args) {
          auto it = g.find(arg);
          if (it == g.end()) return false;
          key.second.push_back(it->second);
        }
        return atoms_.contains(key);
      }
      case Condition::Kind::Not:
        return !exists_extension(c.inner(), g);
      case Condition::Kind::Implies: {
        bool ok = true;
        for_each_extension(c.antecedent(), g, [&](const Embedding& h) {
          ok = exists_extension(c.consequent(), h);
          return ok;
        });
        return ok;
      }
    }
    return false;
  }

  bool all_hold(const Structure& s, const Embedding& g) const {
    return std::all_of(s.conditions.begin(), s.conditions.end(),
                       [&](const Condition& c) { return holds(c, g); });
  }

private:
  void check_cap(std::size_t base, std::size_t exponent) const {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < exponent; ++i) {
      count *= base;
      if (count > limits_.max_maps)
        throw Error(ErrorCode::CapExceeded,
                    "embedding search exceeds " + std::to_string(limits_.max_maps) + " maps");
      if (count == 0) return;
    }
  }

  const Structure& verifier_;
  SearchLimits limits_;
  std::set<AtomKey> atoms_;
};

}  // namespace

Condition Condition::atom(std::string predicate, std::vector<ReferentId> args) {
  Condition c;
  c.kind = Kind::Atom;
  c.predicate = std::move(predicate);
  c.args = std::move(args);
  return c;
}

Condition Condition::negation(Structure inner) {
  Condition c;
  c.kind = Kind::Not;
  c.parts.push_back(std::move(inner));
  return c;
}

Condition Condition::implies(Structure antecedent, Structure consequent) {
  Condition c;
  c.kind = Kind::Implies;
  c.parts.push_back(std::move(antecedent));
  c.parts.push_back(std::move(consequent));
  return c;
}

bool operator==(const Condition& a, const Condition& b) { return compare_conditions(a, b) == 0; }
bool operator<(const Condition& a, const Condition& b) { return compare_conditions(a, b) < 0; }
bool operator==(const Structure& a, const Structure& b) { return compare_structures(a, b) == 0; }
bool operator<(const Structure& a, const Structure& b) { return compare_structures(a, b) < 0; }

Structure::Structure(std::vector<ReferentId> u, std::vector<Condition> c)
    : universe(std::move(u)), conditions(std::move(c)) {
  sort_unique(universe);
  sort_unique(conditions);
}

bool Structure::declares(const ReferentId& id) const {
  return std::binary_search(universe.begin(), universe.end(), id);
}

void validate(const Structure& s) {
  std::vector<const Structure*> scopes;
  validate_in(s, scopes);
}

Structure merge(const Structure& a, const Structure& b) {
  auto universe = a.universe;
  universe.insert(universe.end(), b.universe.begin(), b.universe.end());
  auto conditions = a.conditions;
  conditions.insert(conditions.end(), b.conditions.begin(), b.conditions.end());
  return Structure(std::move(universe), std::move(conditions));
}

bool is_continuation(const Structure& a, const Structure& t) {
  return std::includes(t.universe.begin(), t.universe.end(), a.universe.begin(), a.universe.end()) &&
         std::includes(t.conditions.begin(), t.conditions.end(), a.conditions.begin(),
                       a.conditions.end());
}

Embedding identity_map(const Structure& s) {
  Embedding f;
  for (const auto& id : s.universe) f.emplace(id, id);
  return f;
}

bool embeds_under(const Structure& source, const Structure& target, const Embedding& f,
                  SearchLimits limits) {
  for (const auto& id : source.universe) {
    auto it = f.find(id);
    if (it == f.end() || !target.declares(it->second)) return false;
  }
  return Searcher(target, limits).all_hold(source, f);
}

std::optional<Embedding> find_embedding(const Structure& source, const Structure& target,
                                        SearchLimits limits) {
  std::optional<Embedding> result;
  Searcher(target, limits).for_each_extension(source, {}, [&](const Embedding& g) {
    result = g;
    return false;
  });
  return result;
}

bool check_satisfaction(const Structure& phi, const Structure& verifier, const Embedding& base,
                        SearchLimits limits) {
  return Searcher(verifier, limits).exists_extension(phi, base);
}

ScopedContext ScopedContext::from_parts(Structure presupposed, Structure scoped) {
  ScopedContext ctx;
  ctx.full = merge(presupposed, scoped);
  ctx.presupposed = std::move(presupposed);
  ctx.scoped = std::move(scoped);
  return ctx;
}

}  // namespace lam
