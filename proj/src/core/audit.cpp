#include "lam/audit.hpp"

#include <algorithm>
#include <cmath>

#include "lam/propositional.hpp"

namespace lam {

void StringDist::validate() const {
  for (const auto& [s, p] : entries) {
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(ErrorCode::Data, "probability of '" + s + "' outside [0,1]");
  }
  auto need = [&](const std::string& s, const char* where) {
    if (!entries.contains(s))
      throw Error(ErrorCode::Data, std::string(where) + " references missing string '" + s + "'");
  };
  for (const auto& [a, b] : pairs) {
    need(a, "pair");
    need(b, "pair");
  }
  for (const auto& cls : equivalences) {
    for (const auto& s : cls) need(s, "equivalence class");
  }
  for (const auto& s : tautologies) need(s, "tautology");
}

CoherenceReport audit(const StringDist& dist, double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  dist.validate();
  CoherenceReport report;
  report.epsilon = epsilon;
  auto flag = [&](double metric) {
    if (std::abs(metric) > epsilon) report.strong_hallucination = true;
  };
  for (const auto& pair : dist.pairs) {
    const double d = 1.0 - dist.entries.at(pair.first) - dist.entries.at(pair.second);
    report.complement_deficits.push_back({pair, d});
    flag(d);
  }
  for (const auto& s : dist.tautologies) {
    const double g = 1.0 - dist.entries.at(s);
    report.tautology_gaps.push_back({s, g});
    flag(g);
  }
  for (const auto& cls : dist.equivalences) {
    double lo = 1.0, hi = 0.0;
    for (const auto& s : cls) {
      lo = std::min(lo, dist.entries.at(s));
      hi = std::max(hi, dist.entries.at(s));
    }
    const double div = cls.empty() ? 0.0 : hi - lo;
    report.equivalence_divergences.push_back({cls, div});
    flag(div);
  }
  return report;
}

double dutch_book_margin(const AltDistribution& partition) {
  return std::max(0.0, 1.0 - partition.sum());
}

ChainDecay chain_decay(std::span<const double> step_probs, double distractor) {
  if (!(distractor > 0.0 && distractor < 1.0))
    throw Error(ErrorCode::InvalidArgument, "distractor must lie in (0,1)");
  ChainDecay out;
  double acc = 1.0;
  for (std::size_t i = 0; i < step_probs.size(); ++i) {
    const double p = step_probs[i];
    if (!(p > 0.0 && p < 1.0))
      throw Error(ErrorCode::InvalidArgument,
                  "step " + std::to_string(i + 1) + " has probability " + std::to_string(p) +
                      "; steps must lie in (0,1)");
    acc *= p;
    out.curve.push_back(acc);
    if (!out.hallucination_index && acc < distractor) out.hallucination_index = i + 1;
  }
  return out;
}

WorldModel::WorldModel(std::vector<double> weights,
                       std::map<std::string, std::vector<std::size_t>> valuation)
    : weights_(std::move(weights)) {
  if (weights_.empty() || weights_.size() > kMaxWorlds)
    throw Error(ErrorCode::InvalidArgument, "world model needs 1..64 worlds");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "negative world weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidArgument, "world weights sum to " + std::to_string(total));
  for (const auto& [atom, worlds] : valuation) {
    std::uint64_t bits = 0;
    for (auto w : worlds) {
      if (w >= weights_.size())
        throw Error(ErrorCode::InvalidArgument, "world index out of range for '" + atom + "'");
      bits |= std::uint64_t{1} << w;
    }
    valuation_[atom] = bits;
  }
}

std::uint64_t WorldModel::all_worlds() const {
  return weights_.size() == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << weights_.size()) - 1;
}

std::uint64_t WorldModel::extension(const Formula& f) const {
  const std::uint64_t all = all_worlds();
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      auto it = valuation_.find(f.id());
      if (it == valuation_.end())
        throw Error(ErrorCode::Data, "atom '" + f.id() + "' has no valuation");
      return it->second;
    }
    case Formula::Kind::Not:
      return ~extension(f.left()) & all;
    case Formula::Kind::Seq:
      return extension(f.left()) & extension(f.right());
    case Formula::Kind::Implies:
      return (~extension(f.left()) | extension(f.right())) & all;
  }
  return 0;
}

double WorldModel::mass(std::uint64_t worlds) const {
  double m = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if ((worlds >> i) & 1U) m += weights_[i];
  }
  return m;
}

double WorldModelBase::probability(const std::string& atom,
                                   std::span<const std::string> context) const {
  std::uint64_t given = model_.all_worlds();
  for (const auto& c : context) given &= model_.extension(Formula::atom(c));
  const double denom = model_.mass(given);
  if (denom <= 0.0)
    throw Error(ErrorCode::DivisionByCertainty, "conditioning on a null set of worlds");
  return model_.mass(given & model_.extension(Formula::atom(atom))) / denom;
}

AxiomReport axiom_audit(const WorldModel& wm, std::span<const Formula> formulas) {
  constexpr double tol = 1e-12;
  AxiomReport report;
  auto check = [&](bool ok, const char* axiom, const std::string& detail) {
    ++report.checks;
    if (!ok) report.violations.push_back({axiom, detail});
  };
  for (const auto& f : formulas) {
    const double p = wm.measure(f);
    const std::string text = serialize_formula(f);
    check(std::abs(wm.measure(Formula::negation(f)) - (1.0 - p)) <= tol, "complement", text);
    if (is_tautology(f)) check(std::abs(p - 1.0) <= tol, "tautology", text);
    if (is_contradiction(f)) check(std::abs(p) <= tol, "contradiction", text);
  }
  for (const auto& f : formulas) {
    for (const auto& g : formulas) {
      const std::string texts = serialize_formula(f) + " / " + serialize_formula(g);
      const Formula premise[] = {f};
      const double pf = wm.measure(f);
      const double pg = wm.measure(g);
      if (entails(premise, g)) check(pf <= pg + tol, "monotonicity", texts);
      const Formula both = Formula::seq(f, g);
      check(std::abs(wm.measure(both) - wm.mass(wm.extension(f) & wm.extension(g))) <= tol,
            "conjunction", texts);
      if (is_contradiction(both)) {
        const Formula either =
            Formula::negation(Formula::seq(Formula::negation(f), Formula::negation(g)));
        check(std::abs(wm.measure(either) - (pf + pg)) <= tol, "additivity", texts);
      }
    }
  }
  return report;
}

}  // namespace lam
