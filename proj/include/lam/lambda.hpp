#pragma once

// Probabilities for operator-bearing formulas computed from a base measure
// over operator-free content.
//
// eval(f | ctx):
//   ctx entails f              -> 1       (truth table over at most 16 atoms)
//   ctx entails not f          -> 0
//   not g                      -> 1 - eval(g | ctx)
//   g . h                      -> eval(g | ctx) * eval(h | ctx, g)
//   g => h                     -> 1 - eval(g . not h | ctx)
//   atom a, positive ctx       -> base(a | ctx atoms)
//   atom a, ctx = C0 + not k   -> cond_on_negated(base(a|C0), base(k|C0,a), base(k|C0))
//   atom a, ctx = C0 + X       -> eval(a|C0) * eval(X|C0,a) / eval(X|C0)
//
// Context items are flattened first: `g . h` contributes g and h, `not not g`
// contributes g and `not (g => h)` contributes g and `not h`. Contexts are sets,
// so the result does not depend on item order.

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lam/formula.hpp"

namespace lam {

inline constexpr double kCoherenceEpsilon = 1e-9;

class BaseMeasure {
public:
  virtual ~BaseMeasure() = default;

  // Probability in [0,1] of a positive atom given a set of positive atoms,
  // passed in sorted order.
  virtual double probability(const std::string& atom,
                             std::span<const std::string> context) const = 0;

  // Serial measures have their queries serialized by the engine.
  virtual bool concurrent_safe() const { return true; }
};

// Lookup table keyed by (atom, context set). A query whose exact context is
// not listed falls back to the unconditional entry for the atom.
class TableBase : public BaseMeasure {
public:
  void set(const std::string& atom, double p, std::vector<std::string> context = {});
  bool has(const std::string& atom) const;
  double probability(const std::string& atom,
                     std::span<const std::string> context) const override;

private:
  std::map<std::pair<std::string, std::set<std::string>>, double> table_;
};

// Probability of `a` given the complement of `k`, from P(a), P(k|a) and P(k):
//   P(a | not k) = P(a) (1 - P(k|a)) / (1 - P(k)).
// Throws DivisionByCertainty when p_k = 1 and IncoherentBase when the result
// would exceed 1.
double cond_on_negated(double p_a3, double p_k_given_a3, double p_k);

// Throws BoundExceeded when ctx and f mention more than 16 atoms, Precondition
// when ctx is unsatisfiable, and IncoherentBase / DivisionByCertainty from
// complement conditioning.
double eval(const Formula& f, std::span<const Formula> ctx, const BaseMeasure& base);
double eval(const Formula& f, const BaseMeasure& base);

struct AdmissibilityWitness {
  std::vector<Formula> context;
  double observed = 0;
  double bound = 0;
  std::string detail;
};

struct AdmissibilityReport {
  bool monotone_ok = true;
  std::optional<AdmissibilityWitness> monotone_witness;
  bool conj_elim_ok = true;
  std::optional<AdmissibilityWitness> conj_elim_witness;
  // Contexts checked for monotonicity; zero when eval(a2 | a1) != 1.
  std::size_t checked_pairs = 0;
  std::size_t conj_elim_checked = 0;
};

// Audits a continuation a2 of a1 (a1's `.`-spine must be a prefix of a2's):
// when eval(a2 | a1) = 1, eval(a2 | C) >= eval(a1 | C) for every supplied C;
// and for every `.`-part a4 of a2 (and for a4 empty), eval(a1 . a4 | a2) = 1.
// Violations are reported, not thrown.
AdmissibilityReport check_admissibility(const Formula& a1, const Formula& a2,
                                        std::span<const std::vector<Formula>> contexts,
                                        const BaseMeasure& base);

// The left-nested `.` chain of f: spine(a . b . c) = [a, b, c].
std::vector<Formula> seq_spine(const Formula& f);

}  // namespace lam
