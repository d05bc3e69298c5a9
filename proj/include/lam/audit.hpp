#pragma once

// Coherence checks on string distributions: complement deficits, tautology
// gaps, equivalence divergences, single-partition Dutch books, chain decay,
// and an axiom audit over finite world models.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lam/adapters.hpp"
#include "lam/formula.hpp"
#include "lam/lambda.hpp"

namespace lam {

inline constexpr double kEmpiricalEpsilon = 0.05;

struct StringDist {
  std::map<std::string, double> entries;
  std::vector<std::pair<std::string, std::string>> pairs;  // (φ, ¬φ)
  std::vector<std::vector<std::string>> equivalences;
  std::vector<std::string> tautologies;

  // Throws Data when a probability is out of range or a pair, class or
  // tautology names a missing string.
  void validate() const;
};

struct ComplementDeficit {
  std::pair<std::string, std::string> pair;
  double deficit = 0;  // 1 - μ(φ) - μ(¬φ)
};

struct TautologyGap {
  std::string string;
  double gap = 0;  // 1 - μ
};

struct EquivalenceDivergence {
  std::vector<std::string> members;
  double divergence = 0;  // max pairwise |Δμ|
};

struct CoherenceReport {
  std::vector<ComplementDeficit> complement_deficits;
  std::vector<TautologyGap> tautology_gaps;
  std::vector<EquivalenceDivergence> equivalence_divergences;
  double epsilon = 0;
  bool strong_hallucination = false;
};

// Flags strong hallucination iff any metric exceeds epsilon in magnitude.
CoherenceReport audit(const StringDist& dist, double epsilon = kEmpiricalEpsilon);

// max(0, 1 - Σ p): the bookie's sure profit per unit stake when betting the
// quoted probabilities against every cell of a mutually exclusive, exhaustive
// partition.
double dutch_book_margin(const AltDistribution& partition);

struct ChainDecay {
  std::vector<double> curve;                      // curve[k-1] = Π_{i<=k} step_i
  std::optional<std::size_t> hallucination_index;  // least k with curve < distractor
};

// Throws InvalidArgument unless every step and the distractor lie in (0,1).
ChainDecay chain_decay(std::span<const double> step_probs, double distractor);

// Finite possible-worlds model: weights sum to 1, atoms denote sets of worlds.
class WorldModel {
public:
  static constexpr std::size_t kMaxWorlds = 64;

  // Throws InvalidArgument on negative weights, a sum off 1 by more than 1e-12,
  // more than 64 worlds, or a world index out of range.
  WorldModel(std::vector<double> weights, std::map<std::string, std::vector<std::size_t>> valuation);

  std::size_t world_count() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }

  // Worlds where f holds, as a bitmask. Throws Data for an unvalued atom.
  std::uint64_t extension(const Formula& f) const;
  std::uint64_t all_worlds() const;
  double mass(std::uint64_t worlds) const;
  double measure(const Formula& f) const { return mass(extension(f)); }

  bool has_atom(const std::string& atom) const { return valuation_.contains(atom); }

private:
  std::vector<double> weights_;
  std::map<std::string, std::uint64_t> valuation_;
};

// Base measure read off a world model: base(a | C) = π(⟦a⟧ ∩ ⟦C⟧) / π(⟦C⟧).
// Throws DivisionByCertainty for a null conditioning event.
class WorldModelBase : public BaseMeasure {
public:
  explicit WorldModelBase(WorldModel model) : model_(std::move(model)) {}
  double probability(const std::string& atom,
                     std::span<const std::string> context) const override;
  const WorldModel& model() const { return model_; }

private:
  WorldModel model_;
};

struct AxiomViolation {
  std::string axiom;
  std::string detail;
};

struct AxiomReport {
  std::size_t checks = 0;
  std::vector<AxiomViolation> violations;
};

// Checks π(¬φ) = 1 − π(φ), π(tautology) = 1, φ ⊨ ψ ⇒ π(φ) ≤ π(ψ),
// additivity for jointly unsatisfiable pairs and π(φ.ψ) = π(⟦φ⟧ ∩ ⟦ψ⟧), with
// π read off the model. Entailment is decided by truth table.
AxiomReport axiom_audit(const WorldModel& wm, std::span<const Formula> formulas);

}  // namespace lam
