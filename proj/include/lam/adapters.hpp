#pragma once

#include <string>
#include <utility>
#include <vector>

namespace lam {

struct Alternative {
  std::string label;
  double prob = 0;
  friend bool operator==(const Alternative&, const Alternative&) = default;
};

// Ordered (label, probability) pairs over a finite candidate set.
class AltDistribution {
public:
  AltDistribution() = default;
  // Throws InvalidArgument on out-of-range probabilities, duplicate labels, or
  // (when normalized) a sum outside 1 ± 1e-6.
  explicit AltDistribution(std::vector<Alternative> alternatives, bool normalized = false);

  const std::vector<Alternative>& alternatives() const { return alternatives_; }
  bool normalized() const { return normalized_; }
  std::size_t size() const { return alternatives_.size(); }
  double sum() const;
  // Copy divided by its sum; throws when the sum is 0.
  AltDistribution renormalized() const;

  friend bool operator==(const AltDistribution&, const AltDistribution&) = default;

private:
  std::vector<Alternative> alternatives_;
  bool normalized_ = false;
};

enum class Polarity { Positive, Negated };
enum class Answer { Yes, No };

struct QAQuery {
  std::string id;
  Polarity polarity = Polarity::Positive;
  double base_yes = 0;  // P(Y | question, positive context)
};

struct QAResult {
  Answer answer = Answer::No;
  double prob = 0;
  double yes_prob = 0;
};

// Ties go to No.
QAResult qa_answer(const QAQuery& q);

struct MkrResult {
  AltDistribution flipped_raw;         // 1 - p_i, not normalized
  AltDistribution flipped_normalized;  // raw scores divided by their sum
  std::string selection;               // argmax of raw flipped scores
};

inline constexpr std::size_t kDefaultTopK = 5;

// Restricts to the first k alternatives, assigns 1 - p_i to each and selects
// the highest flipped score, breaking ties by the smallest label. Throws
// Precondition with fewer than 2 alternatives or k outside [2, |topk|].
MkrResult mkr_rerank(const AltDistribution& topk, std::size_t k = kDefaultTopK);

// Highest-probability label, ties to the smallest label.
std::string argmax_label(const AltDistribution& d);

}  // namespace lam
