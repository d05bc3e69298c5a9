#include "lam/nli.hpp"

#include "lam/error.hpp"

namespace lam::nli {

namespace {

constexpr Label E = Label::Entailment;
constexpr Label NotE = Label::NotEntailment;
constexpr Label Cn = Label::Contradiction;
constexpr Label N = Label::Neutral;

Label require(const std::optional<Label>& l, LabelSpace space, const char* pair) {
  if (!l) throw Error(ErrorCode::Precondition, std::string("missing label for ") + pair);
  if (!in_space(*l, space))
    throw Error(ErrorCode::InvalidArgument,
                std::string("label '") + std::string(wire_name(*l)) + "' for " + pair +
                    " is not in the " + (space == LabelSpace::Two ? "2" : "3") + "-label space");
  return *l;
}

void require_space(const PairLabels& labels, LabelSpace space) {
  if (labels.space != space)
    throw Error(ErrorCode::Precondition, space == LabelSpace::Two
                                             ? "algorithm needs 2-label inputs"
                                             : "algorithm needs 3-label inputs");
}

ConfigPrediction predict(Config c, Label l, bool determined, std::string note = {}) {
  return ConfigPrediction{c, l, determined, std::move(note)};
}

// (¬C,h) for three labels, branch by branch. `h_c` may be absent.
ConfigPrediction snli_not_c_h(Label c_h, Label p_h, Label h_cprime, std::optional<Label> h_c,
                              bool h_c_fallback) {
  constexpr auto cfg = Config::NotC_H;
  if (c_h == E) {
    if (p_h == E) return predict(cfg, E, true);
    if (p_h == N && h_cprime == E) return predict(cfg, Cn, true);
    if (h_cprime == N) return predict(cfg, N, false, "heuristic branch (C,h)=E, (h,C')=N");
    return predict(cfg, N, false, "no rule fired");
  }
  if (c_h == Cn) {
    if (p_h == Cn) return predict(cfg, Cn, true);
    if (p_h == N && h_cprime == E) return predict(cfg, Cn, true);
    if (h_cprime == Cn) return predict(cfg, E, false, "heuristic branch (C,h)=Cn, (h,C')=Cn");
    if (h_cprime == N) return predict(cfg, N, false, "heuristic branch (C,h)=Cn, (h,C')=N");
    return predict(cfg, N, false, "no rule fired");
  }
  const Label hc = h_c.value_or(h_cprime);
  if (hc == E) {
    if (h_c_fallback) return predict(cfg, Cn, false, "(h,C) absent; used (h,C')");
    return predict(cfg, Cn, true);
  }
  return predict(cfg, N, false, h_c_fallback ? "(h,C) absent; used (h,C'); default N" : "default N");
}

std::array<ConfigPrediction, 3> snli_from(Label c_h, const ConfigPrediction& not_c_h) {
  return {predict(Config::C_NotH, flip3(c_h), true),
          not_c_h,
          predict(Config::NotC_NotH, flip3(not_c_h.label), not_c_h.determined, not_c_h.note)};
}

}  // namespace

std::string_view wire_name(Label l) {
  switch (l) {
    case Label::Entailment: return "entailment";
    case Label::NotEntailment: return "not_entailment";
    case Label::Contradiction: return "contradiction";
    case Label::Neutral: return "neutral";
  }
  return "";
}

std::optional<Label> parse_label(std::string_view name) {
  for (auto l : {Label::Entailment, Label::NotEntailment, Label::Contradiction, Label::Neutral}) {
    if (wire_name(l) == name) return l;
  }
  return std::nullopt;
}

bool in_space(Label l, LabelSpace space) {
  if (space == LabelSpace::Two) return l == Label::Entailment || l == Label::NotEntailment;
  return l != Label::NotEntailment;
}

std::string_view config_name(Config c) {
  switch (c) {
    case Config::C_NotH: return "C,-h";
    case Config::NotC_H: return "-C,h";
    case Config::NotC_NotH: return "-C,-h";
  }
  return "";
}

Label flip3(Label l) {
  switch (l) {
    case Label::Entailment: return Label::Contradiction;
    case Label::Contradiction: return Label::Entailment;
    default: return l;
  }
}

std::array<ConfigPrediction, 3> rte_unscoped(const PairLabels& labels) {
  require_space(labels, LabelSpace::Two);
  const Label c_h = require(labels.c_h, LabelSpace::Two, "(C,h)");
  const Label h_c = require(labels.h_c, LabelSpace::Two, "(h,C)");

  ConfigPrediction c_not_h =
      c_h == E ? predict(Config::C_NotH, NotE, true)
      : h_c == NotE
          ? predict(Config::C_NotH, NotE, false, "(C,h)=-E and (h,C)=-E: C and h may be disjoint")
          : predict(Config::C_NotH, NotE, false, "E not inferable from positive data");

  // Contraposition: h ⊆ C iff ¬C ⊆ ¬h.
  ConfigPrediction not_c_not_h = predict(Config::NotC_NotH, h_c, true);

  ConfigPrediction not_c_h =
      h_c == E                   ? predict(Config::NotC_H, NotE, true)
      : (c_h == E && h_c == NotE) ? predict(Config::NotC_H, NotE, true)
                                  : predict(Config::NotC_H, NotE, false, "default -E");
  return {c_not_h, not_c_h, not_c_not_h};
}

std::array<ConfigPrediction, 2> rte_scoped(const PairLabels& labels) {
  require_space(labels, LabelSpace::Two);
  const Label c_h = require(labels.c_h, LabelSpace::Two, "(C,h)");
  const Label p_h = require(labels.p_h, LabelSpace::Two, "(P,h)");
  const Label h_c = require(labels.h_c, LabelSpace::Two, "(h,C)");
  const Label h_cprime = require(labels.h_cprime, LabelSpace::Two, "(h,C')");

  ConfigPrediction not_c_h;
  if (h_c == NotE) {
    not_c_h = (c_h == E && p_h == E)
                  ? predict(Config::NotC_H, E, true)
                  : predict(Config::NotC_H, NotE, false, "fallback -E under (h,C)=-E");
  } else {
    not_c_h = predict(Config::NotC_H, NotE, true);
  }

  ConfigPrediction not_c_not_h;
  if (h_c == E) {
    not_c_not_h = p_h == E ? predict(Config::NotC_NotH, E, true)
                           : predict(Config::NotC_NotH, NotE, false,
                                     "(h,C)=E with (P,h)=-E: h ⊆ C′ would give E");
  } else {
    not_c_not_h = h_cprime == E ? predict(Config::NotC_NotH, E, true)
                                : predict(Config::NotC_NotH, NotE, false, "default -E");
  }
  return {not_c_h, not_c_not_h};
}

std::array<ConfigPrediction, 3> snli_scoped(const PairLabels& labels) {
  require_space(labels, LabelSpace::Three);
  const Label c_h = require(labels.c_h, LabelSpace::Three, "(C,h)");
  const Label p_h = require(labels.p_h, LabelSpace::Three, "(P,h)");
  const Label h_cprime = require(labels.h_cprime, LabelSpace::Three, "(h,C')");
  std::optional<Label> h_c;
  if (labels.h_c) h_c = require(labels.h_c, LabelSpace::Three, "(h,C)");
  const bool fallback = c_h == N && !h_c;
  return snli_from(c_h, snli_not_c_h(c_h, p_h, h_cprime, h_c, fallback));
}

std::array<ConfigPrediction, 3> snli_basic(const PairLabels& labels, BasicNBranch mode) {
  require_space(labels, LabelSpace::Three);
  const Label c_h = require(labels.c_h, LabelSpace::Three, "(C,h)");
  const Label h_c = require(labels.h_c, LabelSpace::Three, "(h,C)");
  std::optional<Label> n_branch = h_c;
  if (mode == BasicNBranch::FromHCPrime && labels.h_cprime)
    n_branch = require(labels.h_cprime, LabelSpace::Three, "(h,C')");
  return snli_from(c_h, snli_not_c_h(c_h, N, h_c, n_branch, false));
}

}  // namespace lam::nli
