#pragma once

// End-to-end evaluation runs over NLI, MKR and QA datasets, plus the
// single-shot operations behind the command-line verbs.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lam/audit.hpp"
#include "lam/data.hpp"
#include "lam/formula.hpp"
#include "lam/lambda.hpp"
#include "lam/nli.hpp"
#include "lam/providers.hpp"

namespace lam {

enum class Mode { Baseline, Lambda, LambdaBasic };

std::string_view mode_name(Mode m);
Mode parse_mode(std::string_view name);

struct EvalOptions {
  Mode mode = Mode::Lambda;
  std::optional<nli::LabelSpace> labels;  // when set, every record must use it
  std::size_t k = kDefaultTopK;
  double epsilon = kEmpiricalEpsilon;
  std::size_t parallel = 1;
  nli::BasicNBranch basic_branch = nli::BasicNBranch::FromHC;
};

// Λ mode queries only the positive pairs (C,h), (h,C) and, with scoping,
// (P,h), (h,C′). Baseline queries the negated pairs directly.
EvalReport evaluate_nli(const std::vector<NliRecord>& records, Provider& provider,
                        const EvalOptions& options);
// k is clamped to the number of available candidates per record.
EvalReport evaluate_mkr(const std::vector<MkrRecord>& records, Provider& provider,
                        const EvalOptions& options);
// Λ mode answers negated records from the positive context.
EvalReport evaluate_qa(const std::vector<QaRecord>& records, Provider& provider,
                       const EvalOptions& options);

struct RunConfig {
  std::string task;  // nli | mkr | qa
  Mode mode = Mode::Lambda;
  std::filesystem::path data;
  std::string provider;  // fixture:<path> | http:<url> | gold
  std::optional<int> labels;
  std::size_t k = kDefaultTopK;
  double epsilon = kEmpiricalEpsilon;
  std::optional<std::filesystem::path> out;
  std::size_t parallel = 1;
  bool stamp = false;  // add a wall-clock timestamp to provenance
  RemoteOptions remote;
};

// Throws InvalidArgument for an illegal config, Data/Io for loader failures and
// Provider when the source cannot be created. Record-level provider failures
// are reported as skipped records.
EvalReport run_eval(const RunConfig& cfg);
// Same, with an explicit provider in place of cfg.provider.
EvalReport run_eval(const RunConfig& cfg, Provider& provider);

std::string config_hash(const RunConfig& cfg);

// "A=0.8" or "B|A,C=0.5".
void parse_assignment(std::string_view text, TableBase& base);

// Throws Parse, MissingAssignment or the engine's errors.
double eval_formula(std::string_view formula, const std::vector<std::string>& assignments,
                    const std::vector<std::string>& context);

// Coherence audit of a string distribution, rendered as JSON with per-pair
// Dutch-book margins.
std::string audit_to_json(const StringDist& dist, const CoherenceReport& report);
std::string chain_decay_to_json(const ChainDecay& decay, double distractor);

}  // namespace lam
