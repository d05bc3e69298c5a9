#include "lam/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <thread>

#include <json.hpp>

namespace lam {

using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Runs fn(i) for i in [0, n) on up to `parallel` threads.
template <typename Fn>
void for_each_index(std::size_t n, std::size_t parallel, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(parallel, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

void sort_records(EvalReport& report) {
  std::sort(report.records.begin(), report.records.end(),
            [](const RecordResult& a, const RecordResult& b) { return a.id < b.id; });
}

void finish_score(ConfigScore& s) {
  s.accuracy = s.evaluated == 0 ? 0.0 : static_cast<double>(s.correct) / s.evaluated;
}

// 3-label: argmax over entailment, contradiction, neutral, earlier label on ties.
// 2-label: entailment iff its mass is at least the rest.
nli::Label to_label(const AltDistribution& d, nli::LabelSpace space) {
  const auto& a = d.alternatives();
  const double e = a.at(0).prob, c = a.at(1).prob, n = a.at(2).prob;
  if (space == nli::LabelSpace::Two)
    return e >= c + n ? nli::Label::Entailment : nli::Label::NotEntailment;
  if (e >= c && e >= n) return nli::Label::Entailment;
  if (c >= n) return nli::Label::Contradiction;
  return nli::Label::Neutral;
}

struct NliOutcome {
  bool skipped = false;
  std::array<std::optional<nli::ConfigPrediction>, 3> preds;
  std::map<std::string, std::string> values;
};

NliOutcome run_nli_record(const NliRecord& r, Provider& provider, const EvalOptions& o,
                          std::atomic<std::size_t>& queries) {
  NliOutcome out;
  const auto space = r.label_space;
  auto ask = [&](const std::string& premise, const std::string& hypothesis) {
    ++queries;
    return to_label(provider.get(PredictionRequest::nli(premise, hypothesis)).distribution, space);
  };
  auto wire = [](nli::Label l) { return std::string(nli::wire_name(l)); };
  try {
    if (o.mode == Mode::Baseline) {
      if (!r.neg_context || !r.neg_hypothesis) {
        out.skipped = true;
        out.values["reason"] = "record lacks negated texts";
        return out;
      }
      const std::pair<const std::string*, const std::string*> pairs[] = {
          {&r.context, &*r.neg_hypothesis},
          {&*r.neg_context, &r.hypothesis},
          {&*r.neg_context, &*r.neg_hypothesis}};
      for (std::size_t i = 0; i < 3; ++i) {
        out.preds[i] = nli::ConfigPrediction{nli::kNegatedConfigs[i],
                                             ask(*pairs[i].first, *pairs[i].second), true, "model"};
      }
    } else {
      nli::PairLabels pl;
      pl.space = space;
      pl.c_h = ask(r.context, r.hypothesis);
      pl.h_c = ask(r.hypothesis, r.context);
      const bool scoped = o.mode == Mode::Lambda && r.has_scope();
      if (scoped) {
        pl.p_h = ask(*r.presupposed, r.hypothesis);
        pl.h_cprime = ask(r.hypothesis, *r.scoped);
      }
      out.values["c_h"] = wire(*pl.c_h);
      out.values["h_c"] = wire(*pl.h_c);
      if (pl.p_h) out.values["p_h"] = wire(*pl.p_h);
      if (pl.h_cprime) out.values["h_cprime"] = wire(*pl.h_cprime);
      if (space == nli::LabelSpace::Three) {
        const auto preds = scoped ? nli::snli_scoped(pl) : nli::snli_basic(pl, o.basic_branch);
        for (std::size_t i = 0; i < 3; ++i) out.preds[i] = preds[i];
      } else if (scoped) {
        const auto unscoped = nli::rte_unscoped(pl);
        const auto neg_c = nli::rte_scoped(pl);
        out.preds = {unscoped[0], neg_c[0], neg_c[1]};
      } else {
        const auto preds = nli::rte_unscoped(pl);
        for (std::size_t i = 0; i < 3; ++i) out.preds[i] = preds[i];
      }
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Provider) throw;
    out.skipped = true;
    out.preds = {};
    out.values = {{"reason", e.what()}};
    return out;
  }
  for (const auto& p : out.preds) {
    const std::string name(nli::config_name(p->config));
    out.values[name] = wire(p->label);
    out.values[name + ".determined"] = p->determined ? "true" : "false";
    if (const auto& g = r.gold.negated(p->config)) out.values[name + ".gold"] = wire(*g);
  }
  return out;
}

void check_mode_for_nli(const std::vector<NliRecord>& records, const EvalOptions& o) {
  for (const auto& r : records) {
    if (o.labels && r.label_space != *o.labels)
      throw Error(ErrorCode::Data, "record '" + r.id + "' uses the " +
                                       std::to_string(static_cast<int>(r.label_space)) +
                                       "-label space, expected " +
                                       std::to_string(static_cast<int>(*o.labels)));
    if (o.mode == Mode::LambdaBasic && r.label_space != nli::LabelSpace::Three)
      throw Error(ErrorCode::InvalidArgument, "lambda_basic applies to 3-label NLI only");
  }
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Baseline: return "baseline";
    case Mode::Lambda: return "lambda";
    case Mode::LambdaBasic: return "lambda_basic";
  }
  return "";
}

Mode parse_mode(std::string_view name) {
  if (name == "baseline") return Mode::Baseline;
  if (name == "lambda") return Mode::Lambda;
  if (name == "lambda_basic") return Mode::LambdaBasic;
  throw Error(ErrorCode::InvalidArgument, "unknown mode '" + std::string(name) + "'");
}

EvalReport evaluate_nli(const std::vector<NliRecord>& records, Provider& provider,
                        const EvalOptions& o) {
  check_mode_for_nli(records, o);
  std::vector<NliOutcome> outcomes(records.size());
  std::atomic<std::size_t> queries{0};
  for_each_index(records.size(), o.parallel,
                 [&](std::size_t i) { outcomes[i] = run_nli_record(records[i], provider, o, queries); });

  EvalReport report;
  report.task = "nli";
  report.mode = std::string(mode_name(o.mode));
  report.total = records.size();
  if (o.labels) {
    report.label_space = static_cast<int>(*o.labels);
  } else if (!records.empty() &&
             std::all_of(records.begin(), records.end(), [&](const NliRecord& r) {
               return r.label_space == records.front().label_space;
             })) {
    report.label_space = static_cast<int>(records.front().label_space);
  }
  for (auto c : nli::kNegatedConfigs) report.per_config[std::string(nli::config_name(c))].total = records.size();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& out = outcomes[i];
    report.records.push_back({records[i].id, out.skipped ? "skipped" : "ok", out.values});
    if (out.skipped) {
      ++report.skipped;
      for (auto& [_, s] : report.per_config) ++s.skipped;
      continue;
    }
    for (const auto& p : out.preds) {
      auto& s = report.per_config.at(std::string(nli::config_name(p->config)));
      ++(p->determined ? s.determined : s.defaulted);
      const auto& gold = records[i].gold.negated(p->config);
      if (!gold) continue;
      ++s.evaluated;
      if (*gold == p->label) {
        ++s.correct;
        if (p->determined) ++s.determined_correct;
      }
    }
  }
  double sum = 0.0;
  std::size_t scored = 0;
  for (auto& [_, s] : report.per_config) {
    finish_score(s);
    if (s.evaluated > 0) {
      sum += s.accuracy;
      ++scored;
    }
  }
  if (scored == report.per_config.size()) report.full_accuracy = sum / scored;
  report.metrics["queries"] = static_cast<double>(queries.load());
  sort_records(report);
  return report;
}

EvalReport evaluate_mkr(const std::vector<MkrRecord>& records, Provider& provider,
                        const EvalOptions& o) {
  if (o.k < 2) throw Error(ErrorCode::InvalidArgument, "k must be at least 2 for MKR");
  struct Outcome {
    bool skipped = false;
    bool em = false;
    std::optional<bool> correct;
    std::map<std::string, std::string> values;
  };
  std::vector<Outcome> outcomes(records.size());
  for_each_index(records.size(), o.parallel, [&](std::size_t i) {
    const auto& r = records[i];
    Outcome& out = outcomes[i];
    try {
      const AltDistribution topk =
          r.topk ? *r.topk : provider.get(PredictionRequest::fill_mask(r.positive, o.k)).distribution;
      if (topk.size() < 2)
        throw Error(ErrorCode::Provider, "fewer than 2 candidates for the positive prompt");
      const std::size_t k = std::min(o.k, topk.size());
      const AltDistribution restricted(
          std::vector<Alternative>(topk.alternatives().begin(), topk.alternatives().begin() + k));
      const std::string positive = argmax_label(restricted);
      std::string selection;
      if (o.mode == Mode::Baseline) {
        selection = argmax_label(provider.get(PredictionRequest::fill_mask(r.negative, o.k)).distribution);
      } else {
        const auto res = mkr_rerank(restricted, k);
        selection = res.selection;
        for (const auto& a : res.flipped_raw.alternatives())
          out.values["flipped." + a.label] = fmt_double(a.prob);
      }
      out.em = selection == positive;
      out.values["k"] = std::to_string(k);
      out.values["positive_argmax"] = positive;
      out.values["selection"] = selection;
      out.values["em"] = out.em ? "true" : "false";
      if (r.gold) {
        out.correct = selection == *r.gold;
        out.values["gold"] = *r.gold;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Provider) throw;
      out = Outcome{true, false, std::nullopt, {{"reason", e.what()}}};
    }
  });

  EvalReport report;
  report.task = "mkr";
  report.mode = std::string(mode_name(o.mode));
  report.total = records.size();
  ConfigScore& s = report.per_config["negative"];
  s.total = records.size();
  std::size_t em = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& out = outcomes[i];
    report.records.push_back({records[i].id, out.skipped ? "skipped" : "ok", out.values});
    if (out.skipped) {
      ++report.skipped;
      ++s.skipped;
      continue;
    }
    ++s.determined;
    if (out.em) ++em;
    if (out.correct) {
      ++s.evaluated;
      if (*out.correct) {
        ++s.correct;
        ++s.determined_correct;
      }
    }
  }
  finish_score(s);
  if (s.evaluated > 0) report.full_accuracy = s.accuracy;
  const std::size_t answered = records.size() - report.skipped;
  report.metrics["em"] = static_cast<double>(em);
  report.metrics["em_rate"] = answered == 0 ? 0.0 : static_cast<double>(em) / answered;
  report.manual["non_meaningful_completions"] = std::nullopt;
  sort_records(report);
  return report;
}

EvalReport evaluate_qa(const std::vector<QaRecord>& records, Provider& provider,
                       const EvalOptions& o) {
  struct Outcome {
    bool skipped = false;
    QAResult result;
    std::map<std::string, std::string> values;
  };
  std::vector<Outcome> outcomes(records.size());
  for_each_index(records.size(), o.parallel, [&](std::size_t i) {
    const auto& r = records[i];
    Outcome& out = outcomes[i];
    try {
      QAQuery q{r.id, Polarity::Positive, 0.0};
      if (o.mode == Mode::Baseline) {
        q.base_yes = provider.get(PredictionRequest::qa(r.question, r.context)).distribution
                         .alternatives()[0].prob;
      } else {
        const std::string* context = r.polarity == Polarity::Positive ? &r.context
                                     : r.positive_context          ? &*r.positive_context
                                                                   : nullptr;
        if (!context) {
          out.skipped = true;
          out.values["reason"] = "negated record lacks a positive context";
          return;
        }
        q.polarity = r.polarity;
        q.base_yes = provider.get(PredictionRequest::qa(r.question, *context)).distribution
                         .alternatives()[0].prob;
      }
      out.result = qa_answer(q);
      out.values["answer"] = out.result.answer == Answer::Yes ? "yes" : "no";
      out.values["yes_prob"] = fmt_double(out.result.yes_prob);
      out.values["gold"] = r.gold == Answer::Yes ? "yes" : "no";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Provider) throw;
      out = Outcome{true, {}, {{"reason", e.what()}}};
    }
  });

  EvalReport report;
  report.task = "qa";
  report.mode = std::string(mode_name(o.mode));
  report.total = records.size();
  auto& pos = report.per_config["positive"];
  auto& neg = report.per_config["negated"];
  std::map<std::pair<std::string, std::string>, std::size_t> positive_index;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    const auto& out = outcomes[i];
    auto& s = r.polarity == Polarity::Positive ? pos : neg;
    ++s.total;
    report.records.push_back({r.id, out.skipped ? "skipped" : "ok", out.values});
    if (out.skipped) {
      ++report.skipped;
      ++s.skipped;
      continue;
    }
    ++s.determined;
    ++s.evaluated;
    if (out.result.answer == r.gold) {
      ++s.correct;
      ++s.determined_correct;
    }
    if (r.polarity == Polarity::Positive) positive_index[{r.question, r.context}] = i;
  }
  finish_score(pos);
  finish_score(neg);
  const std::size_t evaluated = pos.evaluated + neg.evaluated;
  if (evaluated > 0)
    report.full_accuracy = static_cast<double>(pos.correct + neg.correct) / evaluated;

  // Twin pairs: P(yes | positive context) and P(yes | negated context) are
  // audited as a sentence and its negation.
  StringDist answers;
  std::size_t twins = 0, complementary = 0;
  double twin_deficit = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.polarity != Polarity::Negated || !r.positive_context || outcomes[i].skipped) continue;
    auto it = positive_index.find({r.question, *r.positive_context});
    if (it == positive_index.end()) continue;
    const auto& a = outcomes[it->second].result;
    const auto& b = outcomes[i].result;
    ++twins;
    if (a.answer != b.answer) ++complementary;
    const std::string yes_pos = records[it->second].id + ":yes", yes_neg = r.id + ":yes";
    answers.entries[yes_pos] = a.yes_prob;
    answers.entries[yes_neg] = b.yes_prob;
    answers.pairs.emplace_back(yes_pos, yes_neg);
    twin_deficit = std::max(twin_deficit, std::abs(1.0 - a.yes_prob - b.yes_prob));
  }
  const auto coherence = audit(answers, o.epsilon);
  double margin = 0.0;
  for (const auto& [yes, no] : answers.pairs) {
    margin = std::max(margin, dutch_book_margin(AltDistribution(
                                  {{yes, answers.entries.at(yes)}, {no, answers.entries.at(no)}})));
  }
  report.metrics["twin_pairs"] = static_cast<double>(twins);
  report.metrics["twin_complementary"] = static_cast<double>(complementary);
  report.metrics["twin_deficit_max"] = twin_deficit;
  report.metrics["dutch_book_margin_max"] = margin;
  report.metrics["strong_hallucination"] = coherence.strong_hallucination ? 1.0 : 0.0;
  sort_records(report);
  return report;
}

std::string config_hash(const RunConfig& cfg) {
  const std::string canonical = "task=" + cfg.task + ";mode=" + std::string(mode_name(cfg.mode)) +
                                ";data=" + cfg.data.string() + ";provider=" + cfg.provider +
                                ";labels=" + (cfg.labels ? std::to_string(*cfg.labels) : "") +
                                ";k=" + std::to_string(cfg.k) +
                                ";epsilon=" + fmt_double(cfg.epsilon);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
  return buf;
}

EvalReport run_eval(const RunConfig& cfg, Provider& provider) {
  EvalOptions o;
  o.mode = cfg.mode;
  o.k = cfg.k;
  o.epsilon = cfg.epsilon;
  o.parallel = cfg.parallel;
  if (cfg.labels) {
    if (*cfg.labels != 2 && *cfg.labels != 3)
      throw Error(ErrorCode::InvalidArgument, "labels must be 2 or 3");
    o.labels = static_cast<nli::LabelSpace>(*cfg.labels);
  }
  if (!(cfg.epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (cfg.mode == Mode::LambdaBasic && cfg.task != "nli")
    throw Error(ErrorCode::InvalidArgument, "lambda_basic applies to NLI only");
  if (cfg.mode == Mode::LambdaBasic && o.labels == nli::LabelSpace::Two)
    throw Error(ErrorCode::InvalidArgument, "lambda_basic applies to 3-label NLI only");

  EvalReport report;
  if (cfg.task == "nli") {
    report = evaluate_nli(std::get<std::vector<NliRecord>>(load_dataset(cfg.data, DatasetKind::Nli)),
                          provider, o);
  } else if (cfg.task == "mkr") {
    report = evaluate_mkr(std::get<std::vector<MkrRecord>>(load_dataset(cfg.data, DatasetKind::Mkr)),
                          provider, o);
  } else if (cfg.task == "qa") {
    report = evaluate_qa(std::get<std::vector<QaRecord>>(load_dataset(cfg.data, DatasetKind::Qa)),
                         provider, o);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown task '" + cfg.task + "'");
  }
  report.provenance["provider"] = provider.describe();
  report.provenance["data"] = cfg.data.filename().string();
  report.provenance["config_hash"] = config_hash(cfg);
  if (cfg.stamp) report.provenance["timestamp"] = iso_timestamp();
  if (cfg.out) write_report(report, *cfg.out);
  return report;
}

EvalReport run_eval(const RunConfig& cfg) {
  if (cfg.provider == "gold") {
    std::unique_ptr<Provider> gold;
    if (cfg.task == "nli") {
      gold = std::make_unique<GoldProvider>(
          std::get<std::vector<NliRecord>>(load_dataset(cfg.data, DatasetKind::Nli)));
    } else if (cfg.task == "qa") {
      gold = std::make_unique<GoldProvider>(
          std::get<std::vector<QaRecord>>(load_dataset(cfg.data, DatasetKind::Qa)));
    } else {
      throw Error(ErrorCode::InvalidArgument, "the gold provider serves nli and qa only");
    }
    return run_eval(cfg, *gold);
  }
  CachingProvider cached(make_provider(cfg.provider, cfg.remote));
  return run_eval(cfg, cached);
}

void parse_assignment(std::string_view text, TableBase& base) {
  const auto eq = text.rfind('=');
  if (eq == std::string_view::npos)
    throw Error(ErrorCode::InvalidArgument, "assignment '" + std::string(text) + "' lacks '='");
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  const std::string_view lhs = trim(text.substr(0, eq));
  const std::string_view rhs = trim(text.substr(eq + 1));
  double p = 0;
  auto [ptr, ec] = std::from_chars(rhs.data(), rhs.data() + rhs.size(), p);
  if (ec != std::errc() || ptr != rhs.data() + rhs.size())
    throw Error(ErrorCode::InvalidArgument, "bad probability in '" + std::string(text) + "'");
  const auto bar = lhs.find('|');
  const std::string atom(trim(lhs.substr(0, bar)));
  if (atom.empty()) throw Error(ErrorCode::InvalidArgument, "assignment without an atom");
  std::vector<std::string> ctx;
  if (bar != std::string_view::npos) {
    std::string_view rest = lhs.substr(bar + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      if (item.empty()) throw Error(ErrorCode::InvalidArgument, "empty context atom in '" + std::string(text) + "'");
      ctx.emplace_back(item);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
  }
  base.set(atom, p, std::move(ctx));
}

double eval_formula(std::string_view formula, const std::vector<std::string>& assignments,
                    const std::vector<std::string>& context) {
  TableBase base;
  for (const auto& a : assignments) parse_assignment(a, base);
  std::vector<Formula> ctx;
  for (const auto& c : context) ctx.push_back(parse_formula(c));
  return eval(parse_formula(formula), ctx, base);
}

std::string audit_to_json(const StringDist& dist, const CoherenceReport& report) {
  json deficits = json::array();
  double margin = 0.0;
  for (const auto& d : report.complement_deficits) {
    const double m = std::max(0.0, d.deficit);
    margin = std::max(margin, m);
    deficits.push_back({{"string", d.pair.first},
                        {"negation", d.pair.second},
                        {"deficit", d.deficit},
                        {"dutch_book_margin", m}});
  }
  json gaps = json::array();
  for (const auto& g : report.tautology_gaps) gaps.push_back({{"string", g.string}, {"gap", g.gap}});
  json divs = json::array();
  for (const auto& d : report.equivalence_divergences)
    divs.push_back({{"members", d.members}, {"divergence", d.divergence}});
  json j{{"strings", dist.entries.size()},
         {"epsilon", report.epsilon},
         {"complement_deficits", deficits},
         {"tautology_gaps", gaps},
         {"equivalence_divergences", divs},
         {"dutch_book_margin", margin},
         {"strong_hallucination", report.strong_hallucination}};
  return j.dump(2) + "\n";
}

std::string chain_decay_to_json(const ChainDecay& decay, double distractor) {
  json j{{"distractor", distractor},
         {"curve", decay.curve},
         {"hallucination_index",
          decay.hallucination_index ? json(*decay.hallucination_index) : json(nullptr)}};
  return j.dump(2) + "\n";
}

}  // namespace lam
