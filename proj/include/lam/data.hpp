#pragma once

// Dataset schemas and loaders. Record files hold one JSON object per line
// (UTF-8); string distributions use the tab-separated format
//
//   <probability>\t<string>        entries, before any section header
//   #pairs   then  <φ>\t<¬φ>
//   #equiv   then  <s1>\t<s2>[\t...]
//   #taut    then  <s>
//
// Blank lines and lines starting with "##" are ignored.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lam/adapters.hpp"
#include "lam/audit.hpp"
#include "lam/nli.hpp"

namespace lam {

struct NliGold {
  std::optional<nli::Label> c_h, p_h, h_c, h_cprime;
  std::optional<nli::Label> c_not_h, not_c_h, not_c_not_h;

  const std::optional<nli::Label>& negated(nli::Config c) const;
};

struct NliRecord {
  std::string id;
  std::string context;
  std::string hypothesis;
  std::optional<std::string> presupposed;  // P
  std::optional<std::string> scoped;       // C′
  std::optional<std::string> neg_context;
  std::optional<std::string> neg_hypothesis;
  nli::LabelSpace label_space = nli::LabelSpace::Three;
  NliGold gold;

  bool has_scope() const { return presupposed.has_value(); }
};

inline constexpr std::string_view kMask = "[MASK]";

struct MkrRecord {
  std::string id;
  std::string positive;
  std::string negative;
  std::optional<std::string> gold;  // expected completion of the negative prompt
  std::optional<AltDistribution> topk;
};

struct QaRecord {
  std::string id;
  std::string context;
  std::string question;
  Polarity polarity = Polarity::Positive;
  Answer gold = Answer::Yes;
  // Operator-free twin of a negated context, queried in place of it.
  std::optional<std::string> positive_context;
};

enum class DatasetKind { Nli, Mkr, Qa, StringDist };

using Dataset =
    std::variant<std::vector<NliRecord>, std::vector<MkrRecord>, std::vector<QaRecord>, StringDist>;

// Validates every line and throws one Data error listing all offending lines.
Dataset load_dataset(const std::filesystem::path& path, DatasetKind kind);

std::vector<NliRecord> parse_nli(std::string_view text, std::string_view source = "<input>");
std::vector<MkrRecord> parse_mkr(std::string_view text, std::string_view source = "<input>");
std::vector<QaRecord> parse_qa(std::string_view text, std::string_view source = "<input>");
StringDist parse_stringdist(std::string_view text, std::string_view source = "<input>");

std::string to_jsonl(const std::vector<NliRecord>& records);
std::string to_jsonl(const std::vector<MkrRecord>& records);
std::string to_jsonl(const std::vector<QaRecord>& records);

// Five positive and five negated question templates crossed with six colors,
// ordered schema, color, then positive before negated.
std::vector<QaRecord> generate_syn();

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// ---------------------------------------------------------------------------
// Reports

inline constexpr int kReportSchemaVersion = 1;

struct ConfigScore {
  std::size_t total = 0;
  std::size_t evaluated = 0;  // total minus skipped minus records without gold
  std::size_t correct = 0;
  std::size_t determined = 0;
  std::size_t defaulted = 0;
  std::size_t skipped = 0;
  std::size_t determined_correct = 0;
  double accuracy = 0;

  friend bool operator==(const ConfigScore&, const ConfigScore&) = default;
};

struct RecordResult {
  std::string id;
  std::string status;  // "ok" | "skipped"
  std::map<std::string, std::string> values;

  friend bool operator==(const RecordResult&, const RecordResult&) = default;
};

struct EvalReport {
  int schema_version = kReportSchemaVersion;
  std::string task;
  std::string mode;
  int label_space = 0;
  std::size_t total = 0;
  std::size_t skipped = 0;
  std::map<std::string, ConfigScore> per_config;
  std::optional<double> full_accuracy;
  std::map<std::string, double> metrics;
  // Fields filled by hand after a run; serialized as null until then.
  std::map<std::string, std::optional<double>> manual;
  std::map<std::string, std::string> provenance;
  std::vector<RecordResult> records;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Stable key order; identical reports give identical bytes.
std::string report_to_string(const EvalReport& report);
EvalReport report_from_string(std::string_view text);
void write_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report(const std::filesystem::path& path);

}  // namespace lam
