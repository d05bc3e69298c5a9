#include "lam/lam.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lam/adapters.hpp"
#include "lam/audit.hpp"
#include "lam/data.hpp"
#include "lam/formula.hpp"
#include "lam/harness.hpp"
#include "lam/lambda.hpp"
#include "lam/nli.hpp"
#include "lam/structure.hpp"

struct lam_formula {
  lam::Formula f;
};

struct lam_base {
  lam::TableBase table;
};

struct lam_structure {
  lam::Structure s;
};

namespace {

thread_local std::string g_last_error;
thread_local std::size_t g_span_start = 0;
thread_local std::size_t g_span_end = 0;

lam_status status_of(lam::ErrorCode code) {
  switch (code) {
    case lam::ErrorCode::InvalidArgument: return LAM_ERR_INVALID_ARGUMENT;
    case lam::ErrorCode::Parse: return LAM_ERR_PARSE;
    case lam::ErrorCode::CapExceeded: return LAM_ERR_CAP_EXCEEDED;
    case lam::ErrorCode::BoundExceeded: return LAM_ERR_BOUND_EXCEEDED;
    case lam::ErrorCode::IncoherentBase: return LAM_ERR_INCOHERENT_BASE;
    case lam::ErrorCode::DivisionByCertainty: return LAM_ERR_DIVISION_BY_CERTAINTY;
    case lam::ErrorCode::Precondition: return LAM_ERR_PRECONDITION;
    case lam::ErrorCode::MissingAssignment: return LAM_ERR_MISSING_ASSIGNMENT;
    case lam::ErrorCode::Data: return LAM_ERR_DATA;
    case lam::ErrorCode::Provider: return LAM_ERR_PROVIDER;
    case lam::ErrorCode::Io: return LAM_ERR_IO;
  }
  return LAM_ERR_INTERNAL;
}

lam_status fail(lam_status status, std::string message) {
  g_last_error = std::move(message);
  g_span_start = g_span_end = 0;
  return status;
}

template <typename Fn>
lam_status guarded(Fn&& fn) {
  try {
    fn();
    return LAM_OK;
  } catch (const lam::ParseError& e) {
    fail(LAM_ERR_PARSE, e.what());
    g_span_start = e.span().start;
    g_span_end = e.span().end;
    return LAM_ERR_PARSE;
  } catch (const lam::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LAM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LAM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LAM_ERR_INTERNAL, "unknown exception");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw lam::Error(lam::ErrorCode::InvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::optional<lam::nli::Label> to_label(int v) {
  switch (v) {
    case LAM_NLI_UNSET: return std::nullopt;
    case LAM_NLI_ENTAILMENT: return lam::nli::Label::Entailment;
    case LAM_NLI_NOT_ENTAILMENT: return lam::nli::Label::NotEntailment;
    case LAM_NLI_CONTRADICTION: return lam::nli::Label::Contradiction;
    case LAM_NLI_NEUTRAL: return lam::nli::Label::Neutral;
  }
  throw lam::Error(lam::ErrorCode::InvalidArgument, "unknown label code " + std::to_string(v));
}

int from_label(lam::nli::Label l) {
  switch (l) {
    case lam::nli::Label::Entailment: return LAM_NLI_ENTAILMENT;
    case lam::nli::Label::NotEntailment: return LAM_NLI_NOT_ENTAILMENT;
    case lam::nli::Label::Contradiction: return LAM_NLI_CONTRADICTION;
    case lam::nli::Label::Neutral: return LAM_NLI_NEUTRAL;
  }
  return LAM_NLI_UNSET;
}

lam::nli::PairLabels to_pairs(const lam_pair_labels* in) {
  require(in != nullptr, "labels is NULL");
  require(in->label_space == 2 || in->label_space == 3, "label_space must be 2 or 3");
  lam::nli::PairLabels out;
  out.space = static_cast<lam::nli::LabelSpace>(in->label_space);
  out.c_h = to_label(in->c_h);
  out.p_h = to_label(in->p_h);
  out.h_c = to_label(in->h_c);
  out.h_cprime = to_label(in->h_cprime);
  return out;
}

template <std::size_t N>
void copy_predictions(const std::array<lam::nli::ConfigPrediction, N>& preds,
                      lam_config_prediction* out) {
  require(out != nullptr, "out is NULL");
  for (std::size_t i = 0; i < N; ++i) {
    out[i].config = static_cast<int>(preds[i].config);
    out[i].label = from_label(preds[i].label);
    out[i].determined = preds[i].determined ? 1 : 0;
  }
}

lam::SearchLimits limits_of(unsigned long long max_maps) {
  lam::SearchLimits l;
  if (max_maps != 0) l.max_maps = max_maps;
  return l;
}

lam::RunConfig run_config_from_json(const char* text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw lam::Error(lam::ErrorCode::InvalidArgument, std::string("config is not JSON: ") + e.what());
  }
  require(j.is_object(), "config must be a JSON object");
  static const char* known[] = {"task",  "mode", "data",     "provider", "labels",     "k",
                                "epsilon", "out", "parallel", "stamp",    "retries",    "backoff_ms",
                                "max_in_flight"};
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(std::begin(known), std::end(known), [&](const char* k) { return key == k; }))
      throw lam::Error(lam::ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
  }
  try {
    lam::RunConfig cfg;
    cfg.task = j.at("task").get<std::string>();
    cfg.mode = lam::parse_mode(j.value("mode", std::string("lambda")));
    cfg.data = j.at("data").get<std::string>();
    cfg.provider = j.at("provider").get<std::string>();
    if (j.contains("labels")) cfg.labels = j.at("labels").get<int>();
    cfg.k = j.value("k", lam::kDefaultTopK);
    cfg.epsilon = j.value("epsilon", lam::kEmpiricalEpsilon);
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    cfg.parallel = j.value("parallel", std::size_t{1});
    cfg.stamp = j.value("stamp", false);
    cfg.remote.retries = j.value("retries", cfg.remote.retries);
    cfg.remote.backoff = std::chrono::milliseconds(j.value("backoff_ms", cfg.remote.backoff.count()));
    cfg.remote.max_in_flight = j.value("max_in_flight", cfg.remote.max_in_flight);
    return cfg;
  } catch (const json::exception& e) {
    throw lam::Error(lam::ErrorCode::InvalidArgument, std::string("bad config: ") + e.what());
  }
}

}  // namespace

extern "C" {

const char* lam_version(void) { return "1.0.0"; }

const char* lam_status_name(lam_status status) {
  switch (status) {
    case LAM_OK: return "ok";
    case LAM_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case LAM_ERR_PARSE: return "parse";
    case LAM_ERR_CAP_EXCEEDED: return "cap_exceeded";
    case LAM_ERR_BOUND_EXCEEDED: return "bound_exceeded";
    case LAM_ERR_INCOHERENT_BASE: return "incoherent_base";
    case LAM_ERR_DIVISION_BY_CERTAINTY: return "division_by_certainty";
    case LAM_ERR_PRECONDITION: return "precondition";
    case LAM_ERR_MISSING_ASSIGNMENT: return "missing_assignment";
    case LAM_ERR_DATA: return "data";
    case LAM_ERR_PROVIDER: return "provider";
    case LAM_ERR_IO: return "io";
    case LAM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* lam_last_error(void) { return g_last_error.c_str(); }

void lam_last_error_span(size_t* start, size_t* end) {
  if (start) *start = g_span_start;
  if (end) *end = g_span_end;
}

void lam_free_string(char* s) { std::free(s); }

lam_status lam_formula_parse(const char* text, lam_formula** out) {
  return guarded([&] {
    require(text && out, "NULL argument");
    *out = new lam_formula{lam::parse_formula(text)};
  });
}

void lam_formula_free(lam_formula* f) { delete f; }

lam_status lam_formula_serialize(const lam_formula* f, char** out) {
  return guarded([&] {
    require(f && out, "NULL argument");
    *out = dup_string(lam::serialize_formula(f->f));
  });
}

lam_status lam_base_new(lam_base** out) {
  return guarded([&] {
    require(out, "NULL argument");
    *out = new lam_base{};
  });
}

void lam_base_free(lam_base* base) { delete base; }

lam_status lam_base_set(lam_base* base, const char* atom, double p, const char* const* context,
                        size_t n) {
  return guarded([&] {
    require(base && atom, "NULL argument");
    require(n == 0 || context, "context is NULL");
    std::vector<std::string> ctx;
    for (size_t i = 0; i < n; ++i) {
      require(context[i], "context entry is NULL");
      ctx.emplace_back(context[i]);
    }
    base->table.set(atom, p, std::move(ctx));
  });
}

lam_status lam_base_assign(lam_base* base, const char* assignment) {
  return guarded([&] {
    require(base && assignment, "NULL argument");
    lam::parse_assignment(assignment, base->table);
  });
}

lam_status lam_eval(const lam_formula* f, const lam_formula* const* context, size_t n,
                    const lam_base* base, double* out) {
  return guarded([&] {
    require(f && base && out, "NULL argument");
    require(n == 0 || context, "context is NULL");
    std::vector<lam::Formula> ctx;
    for (size_t i = 0; i < n; ++i) {
      require(context[i], "context entry is NULL");
      ctx.push_back(context[i]->f);
    }
    *out = lam::eval(f->f, ctx, base->table);
  });
}

lam_status lam_cond_on_negated(double p_a3, double p_k_given_a3, double p_k, double* out) {
  return guarded([&] {
    require(out, "NULL argument");
    *out = lam::cond_on_negated(p_a3, p_k_given_a3, p_k);
  });
}

lam_status lam_structure_parse(const char* text, lam_structure** out) {
  return guarded([&] {
    require(text && out, "NULL argument");
    *out = new lam_structure{lam::parse_structure(text)};
  });
}

void lam_structure_free(lam_structure* s) { delete s; }

lam_status lam_structure_serialize(const lam_structure* s, char** out) {
  return guarded([&] {
    require(s && out, "NULL argument");
    *out = dup_string(lam::serialize_structure(s->s));
  });
}

lam_status lam_structure_merge(const lam_structure* a, const lam_structure* b, lam_structure** out) {
  return guarded([&] {
    require(a && b && out, "NULL argument");
    *out = new lam_structure{lam::merge(a->s, b->s)};
  });
}

lam_status lam_find_embedding(const lam_structure* source, const lam_structure* target,
                              unsigned long long max_maps, int* found, char** mapping) {
  return guarded([&] {
    require(source && target && found, "NULL argument");
    const auto e = lam::find_embedding(source->s, target->s, limits_of(max_maps));
    *found = e ? 1 : 0;
    if (mapping) {
      std::string text;
      if (e) {
        for (const auto& [from, to] : *e) {
          if (!text.empty()) text += ',';
          text += from + "->" + to;
        }
      }
      *mapping = dup_string(text);
    }
  });
}

lam_status lam_check_satisfaction(const lam_structure* phi, const lam_structure* verifier,
                                  unsigned long long max_maps, int* out) {
  return guarded([&] {
    require(phi && verifier && out, "NULL argument");
    *out = lam::check_satisfaction(phi->s, verifier->s, {}, limits_of(max_maps)) ? 1 : 0;
  });
}

lam_status lam_nli_rte_unscoped(const lam_pair_labels* labels, lam_config_prediction out[3]) {
  return guarded([&] { copy_predictions(lam::nli::rte_unscoped(to_pairs(labels)), out); });
}

lam_status lam_nli_rte_scoped(const lam_pair_labels* labels, lam_config_prediction out[2]) {
  return guarded([&] { copy_predictions(lam::nli::rte_scoped(to_pairs(labels)), out); });
}

lam_status lam_nli_snli_scoped(const lam_pair_labels* labels, lam_config_prediction out[3]) {
  return guarded([&] { copy_predictions(lam::nli::snli_scoped(to_pairs(labels)), out); });
}

lam_status lam_nli_snli_basic(const lam_pair_labels* labels, int from_hcprime,
                              lam_config_prediction out[3]) {
  return guarded([&] {
    const auto mode = from_hcprime ? lam::nli::BasicNBranch::FromHCPrime : lam::nli::BasicNBranch::FromHC;
    copy_predictions(lam::nli::snli_basic(to_pairs(labels), mode), out);
  });
}

lam_status lam_qa_answer(int polarity, double base_yes, int* answer, double* prob) {
  return guarded([&] {
    require(polarity == 0 || polarity == 1, "polarity must be 0 or 1");
    const auto r = lam::qa_answer(
        {"", polarity == 0 ? lam::Polarity::Positive : lam::Polarity::Negated, base_yes});
    if (answer) *answer = r.answer == lam::Answer::Yes ? 1 : 0;
    if (prob) *prob = r.prob;
  });
}

lam_status lam_mkr_rerank(const char* const* labels, const double* probs, size_t n, size_t k,
                          double* flipped, char** selection) {
  return guarded([&] {
    require(labels && probs, "NULL argument");
    std::vector<lam::Alternative> alts;
    for (size_t i = 0; i < n; ++i) {
      require(labels[i], "label is NULL");
      alts.push_back({labels[i], probs[i]});
    }
    const auto r = lam::mkr_rerank(lam::AltDistribution(std::move(alts)), k);
    if (flipped) {
      for (size_t i = 0; i < r.flipped_raw.size(); ++i) flipped[i] = r.flipped_raw.alternatives()[i].prob;
    }
    if (selection) *selection = dup_string(r.selection);
  });
}

lam_status lam_dutch_book_margin(const double* probs, size_t n, double* out) {
  return guarded([&] {
    require(out && (n == 0 || probs), "NULL argument");
    std::vector<lam::Alternative> alts;
    for (size_t i = 0; i < n; ++i) alts.push_back({std::to_string(i), probs[i]});
    *out = lam::dutch_book_margin(lam::AltDistribution(std::move(alts)));
  });
}

lam_status lam_chain_decay(const double* steps, size_t n, double distractor, double* curve,
                           size_t* index) {
  return guarded([&] {
    require(n == 0 || steps, "steps is NULL");
    const auto d = lam::chain_decay(std::span<const double>(steps, n), distractor);
    if (curve) std::copy(d.curve.begin(), d.curve.end(), curve);
    if (index) *index = d.hallucination_index.value_or(0);
  });
}

lam_status lam_audit_file(const char* path, double epsilon, char** report_json) {
  return guarded([&] {
    require(path && report_json, "NULL argument");
    const auto dist = std::get<lam::StringDist>(lam::load_dataset(path, lam::DatasetKind::StringDist));
    *report_json = dup_string(lam::audit_to_json(dist, lam::audit(dist, epsilon)));
  });
}

lam_status lam_generate_syn(char** jsonl) {
  return guarded([&] {
    require(jsonl, "NULL argument");
    *jsonl = dup_string(lam::to_jsonl(lam::generate_syn()));
  });
}

lam_status lam_run_eval(const char* config_json, char** report_json) {
  return guarded([&] {
    require(config_json && report_json, "NULL argument");
    *report_json = dup_string(lam::report_to_string(lam::run_eval(run_config_from_json(config_json))));
  });
}

}  // extern "C"
