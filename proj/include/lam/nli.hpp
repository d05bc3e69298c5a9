#pragma once

// Label propagation from positive-pair judgments to the negated
// configurations (C,¬h), (¬C,h) and (¬C,¬h).
//
// Every prediction carries `determined`: true only when the branch that fired
// is valid under the set reading of the labels (E: ⟦C⟧ ⊆ ⟦h⟧, Cn: disjoint,
// N: otherwise; scoped ¬C = ⟦P⟧ minus ⟦C′⟧). Branches that merely totalize the
// algorithms, or that can disagree with that reading, are marked false.

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lam::nli {

enum class Label { Entailment, NotEntailment, Contradiction, Neutral };

enum class LabelSpace { Two = 2, Three = 3 };

// Wire names: "entailment", "not_entailment", "contradiction", "neutral".
std::string_view wire_name(Label l);
std::optional<Label> parse_label(std::string_view name);
bool in_space(Label l, LabelSpace space);

enum class Config { C_NotH, NotC_H, NotC_NotH };

// "C,-h", "-C,h", "-C,-h".
std::string_view config_name(Config c);
inline constexpr std::array<Config, 3> kNegatedConfigs{Config::C_NotH, Config::NotC_H,
                                                       Config::NotC_NotH};

struct PairLabels {
  LabelSpace space = LabelSpace::Three;
  std::optional<Label> c_h;       // (C, h)
  std::optional<Label> p_h;       // (P, h)
  std::optional<Label> h_c;       // (h, C)
  std::optional<Label> h_cprime;  // (h, C′)
};

struct ConfigPrediction {
  Config config = Config::C_NotH;
  Label label = Label::Neutral;
  bool determined = false;
  std::string note;
};

// E <-> Cn, N -> N.
Label flip3(Label l);

// Unscoped two-label rules. Requires c_h and h_c.
std::array<ConfigPrediction, 3> rte_unscoped(const PairLabels& labels);

// Scoped two-label rules for (¬C,h) and (¬C,¬h). Requires c_h, p_h, h_c, h_cprime.
std::array<ConfigPrediction, 2> rte_scoped(const PairLabels& labels);

// Scoped three-label rules. Requires c_h, p_h, h_cprime; h_c is consulted only
// when c_h = N and falls back to h_cprime (flagged) when absent.
std::array<ConfigPrediction, 3> snli_scoped(const PairLabels& labels);

// Which label feeds the c_h = N branch of the wide-scope variant.
enum class BasicNBranch { FromHC, FromHCPrime };

// Three-label rules with sentence-wide scope: P is empty, so p_h is N and
// h_cprime is h_c (or the supplied h_cprime under FromHCPrime).
std::array<ConfigPrediction, 3> snli_basic(const PairLabels& labels,
                                           BasicNBranch mode = BasicNBranch::FromHC);

}  // namespace lam::nli
