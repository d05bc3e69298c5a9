#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lam/lam.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kProvider = 3 };

int exit_for(lam_status s) {
  switch (s) {
    case LAM_OK: return kOk;
    case LAM_ERR_INVALID_ARGUMENT: return kUsage;
    case LAM_ERR_PROVIDER: return kProvider;
    default: return kData;
  }
}

int report_failure(lam_status s) {
  std::cerr << "lam: " << lam_status_name(s) << ": " << lam_last_error() << "\n";
  return exit_for(s);
}

struct Owned {
  char* p = nullptr;
  ~Owned() { lam_free_string(p); }
};

struct EvalArgs {
  std::string data;
  std::string provider;
  std::string mode = "lambda";
  std::optional<int> labels;
  std::size_t k = 5;
  double epsilon = 0.05;
  std::string out;
  std::size_t parallel = 1;
  bool stamp = false;
  int retries = 3;
  int backoff_ms = 100;
  std::size_t max_in_flight = 4;
};

void add_eval_flags(CLI::App* cmd, EvalArgs& a, bool nli) {
  cmd->add_option("--data", a.data, "Dataset file (JSONL)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--provider", a.provider, "fixture:<path> | http:<url> | gold")->required();
  cmd->add_option("--mode", a.mode, "baseline | lambda | lambda_basic")
      ->check(CLI::IsMember({"baseline", "lambda", "lambda_basic"}));
  if (nli) cmd->add_option("--labels", a.labels, "Label space")->check(CLI::IsMember({2, 3}));
  cmd->add_option("--k", a.k, "Top-k cutoff")->check(CLI::Range(2, 1000));
  cmd->add_option("--epsilon", a.epsilon, "Coherence tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--out", a.out, "Report path; stdout when omitted");
  cmd->add_option("--parallel", a.parallel, "Record-level workers")->check(CLI::Range(1, 256));
  cmd->add_flag("--stamp", a.stamp, "Record a timestamp in the report");
  cmd->add_option("--retries", a.retries, "Remote retries")->check(CLI::Range(0, 10));
  cmd->add_option("--backoff-ms", a.backoff_ms, "Initial remote backoff")->check(CLI::Range(0, 60000));
  cmd->add_option("--max-in-flight", a.max_in_flight, "Concurrent remote requests")
      ->check(CLI::Range(1, 256));
}

int run_eval(const std::string& task, const EvalArgs& a) {
  nlohmann::json cfg{{"task", task},         {"mode", a.mode},          {"data", a.data},
                     {"provider", a.provider}, {"k", a.k},              {"epsilon", a.epsilon},
                     {"parallel", a.parallel}, {"stamp", a.stamp},      {"retries", a.retries},
                     {"backoff_ms", a.backoff_ms}, {"max_in_flight", a.max_in_flight}};
  if (a.labels) cfg["labels"] = *a.labels;
  if (!a.out.empty()) cfg["out"] = a.out;
  Owned report;
  if (auto s = lam_run_eval(cfg.dump().c_str(), &report.p); s != LAM_OK) return report_failure(s);
  const auto doc = nlohmann::json::parse(report.p);
  if (a.out.empty()) {
    std::cout << report.p;
  } else {
    std::cout << task << " " << a.mode << ": " << doc["total"] << " records, " << doc["skipped"]
              << " skipped";
    if (!doc["full_accuracy"].is_null()) std::cout << ", accuracy " << doc["full_accuracy"];
    std::cout << " -> " << a.out << "\n";
  }
  const auto total = doc["total"].get<std::size_t>();
  if (total > 0 && doc["skipped"].get<std::size_t>() == total) {
    std::cerr << "lam: every record was skipped; see the report for reasons\n";
    return kProvider;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Negation-coherent evaluation of language-model distributions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lam_version()));

  EvalArgs nli_args, mkr_args, qa_args;
  auto* nli = app.add_subcommand("eval-nli", "Evaluate negated NLI configurations");
  add_eval_flags(nli, nli_args, true);
  auto* mkr = app.add_subcommand("eval-mkr", "Evaluate masked completion of negated prompts");
  add_eval_flags(mkr, mkr_args, false);
  auto* qa = app.add_subcommand("eval-qa", "Evaluate yes/no questions over negated contexts");
  add_eval_flags(qa, qa_args, false);

  std::string syn_out;
  auto* syn = app.add_subcommand("gen-syn", "Write the synthetic QA dataset as JSONL");
  syn->add_option("--out", syn_out, "Output path; stdout when omitted");

  std::string audit_data;
  double audit_epsilon = 0.05;
  std::vector<double> steps;
  double distractor = 0.5;
  std::string audit_out;
  auto* aud = app.add_subcommand("audit", "Coherence audit of a string distribution");
  aud->add_option("--data", audit_data, "Distribution file (TSV)")->check(CLI::ExistingFile);
  aud->add_option("--epsilon", audit_epsilon, "Hallucination threshold")->check(CLI::PositiveNumber);
  aud->add_option("--steps", steps, "Per-step probabilities for a chain-decay curve");
  aud->add_option("--distractor", distractor, "Distractor probability for chain decay");
  aud->add_option("--out", audit_out, "Output path; stdout when omitted");

  std::string formula;
  std::vector<std::string> assigns, ctx;
  auto* ev = app.add_subcommand("eval-formula", "Evaluate a formula against assigned base probabilities");
  ev->add_option("formula", formula, "Formula text")->required();
  ev->add_option("--assign", assigns, "A=0.8 or B|A=0.5 (repeatable)");
  ev->add_option("--ctx", ctx, "Context formula (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (nli->parsed()) return run_eval("nli", nli_args);
  if (mkr->parsed()) return run_eval("mkr", mkr_args);
  if (qa->parsed()) return run_eval("qa", qa_args);

  if (syn->parsed()) {
    Owned text;
    if (auto s = lam_generate_syn(&text.p); s != LAM_OK) return report_failure(s);
    if (syn_out.empty()) {
      std::cout << text.p;
      return kOk;
    }
    std::FILE* f = std::fopen(syn_out.c_str(), "wb");
    if (!f || std::fputs(text.p, f) < 0) {
      if (f) std::fclose(f);
      std::cerr << "lam: cannot write '" << syn_out << "'\n";
      return kData;
    }
    std::fclose(f);
    return kOk;
  }

  if (aud->parsed()) {
    if (audit_data.empty() && steps.empty()) {
      std::cerr << "lam: audit needs --data or --steps\n";
      return kUsage;
    }
    nlohmann::json out = nlohmann::json::object();
    if (!audit_data.empty()) {
      Owned text;
      if (auto s = lam_audit_file(audit_data.c_str(), audit_epsilon, &text.p); s != LAM_OK)
        return report_failure(s);
      out["coherence"] = nlohmann::json::parse(text.p);
    }
    if (!steps.empty()) {
      std::vector<double> curve(steps.size());
      std::size_t index = 0;
      if (auto s = lam_chain_decay(steps.data(), steps.size(), distractor, curve.data(), &index);
          s != LAM_OK)
        return report_failure(s);
      out["chain_decay"] = {{"distractor", distractor},
                            {"curve", curve},
                            {"hallucination_index", index == 0 ? nlohmann::json(nullptr)
                                                               : nlohmann::json(index)}};
    }
    const std::string rendered = out.dump(2) + "\n";
    if (audit_out.empty()) {
      std::cout << rendered;
    } else {
      std::FILE* f = std::fopen(audit_out.c_str(), "wb");
      if (!f || std::fputs(rendered.c_str(), f) < 0) {
        if (f) std::fclose(f);
        std::cerr << "lam: cannot write '" << audit_out << "'\n";
        return kData;
      }
      std::fclose(f);
    }
    return kOk;
  }

  if (ev->parsed()) {
    lam_base* base = nullptr;
    lam_formula* f = nullptr;
    std::vector<lam_formula*> context;
    auto cleanup = [&] {
      for (auto* c : context) lam_formula_free(c);
      lam_formula_free(f);
      lam_base_free(base);
    };
    lam_status s = lam_base_new(&base);
    for (std::size_t i = 0; s == LAM_OK && i < assigns.size(); ++i) s = lam_base_assign(base, assigns[i].c_str());
    if (s == LAM_OK) s = lam_formula_parse(formula.c_str(), &f);
    for (std::size_t i = 0; s == LAM_OK && i < ctx.size(); ++i) {
      lam_formula* c = nullptr;
      s = lam_formula_parse(ctx[i].c_str(), &c);
      if (s == LAM_OK) context.push_back(c);
    }
    double value = 0;
    if (s == LAM_OK) s = lam_eval(f, context.data(), context.size(), base, &value);
    cleanup();
    if (s == LAM_OK) {
      std::printf("%.17g\n", value);
      return kOk;
    }
    return report_failure(s);
  }
  return kUsage;
}
