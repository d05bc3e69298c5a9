#include "lam/adapters.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "lam/error.hpp"

namespace lam {

AltDistribution::AltDistribution(std::vector<Alternative> alternatives, bool normalized)
    : alternatives_(std::move(alternatives)), normalized_(normalized) {
  std::set<std::string> seen;
  for (const auto& a : alternatives_) {
    if (!(a.prob >= 0.0 && a.prob <= 1.0))
      throw Error(ErrorCode::InvalidArgument,
                  "probability for '" + a.label + "' outside [0,1]: " + std::to_string(a.prob));
    if (!seen.insert(a.label).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate alternative '" + a.label + "'");
  }
  if (normalized_ && std::abs(sum() - 1.0) > 1e-6)
    throw Error(ErrorCode::InvalidArgument,
                "normalized distribution sums to " + std::to_string(sum()));
}

double AltDistribution::sum() const {
  return std::accumulate(alternatives_.begin(), alternatives_.end(), 0.0,
                         [](double acc, const Alternative& a) { return acc + a.prob; });
}

AltDistribution AltDistribution::renormalized() const {
  const double total = sum();
  if (total <= 0.0) throw Error(ErrorCode::InvalidArgument, "cannot renormalize zero mass");
  std::vector<Alternative> out = alternatives_;
  for (auto& a : out) a.prob /= total;
  return AltDistribution(std::move(out), true);
}

QAResult qa_answer(const QAQuery& q) {
  if (!(q.base_yes >= 0.0 && q.base_yes <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "yes-probability outside [0,1]");
  const double yes = q.polarity == Polarity::Positive ? q.base_yes : 1.0 - q.base_yes;
  const double no = 1.0 - yes;
  if (yes > no) return {Answer::Yes, yes, yes};
  return {Answer::No, no, yes};
}

std::string argmax_label(const AltDistribution& d) {
  if (d.size() == 0) throw Error(ErrorCode::Precondition, "empty distribution");
  const Alternative* best = &d.alternatives().front();
  for (const auto& a : d.alternatives()) {
    if (a.prob > best->prob || (a.prob == best->prob && a.label < best->label)) best = &a;
  }
  return best->label;
}

MkrResult mkr_rerank(const AltDistribution& topk, std::size_t k) {
  if (topk.size() < 2)
    throw Error(ErrorCode::Precondition, "negation needs at least 2 alternatives");
  if (k < 2 || k > topk.size())
    throw Error(ErrorCode::Precondition, "k=" + std::to_string(k) + " outside [2, " +
                                             std::to_string(topk.size()) + "]");
  std::vector<Alternative> flipped;
  flipped.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& a = topk.alternatives()[i];
    flipped.push_back({a.label, 1.0 - a.prob});
  }
  AltDistribution raw(std::move(flipped));
  MkrResult result{raw, raw.renormalized(), argmax_label(raw)};
  return result;
}

}  // namespace lam
