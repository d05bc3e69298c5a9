#include "lam/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace lam {

using nlohmann::json;

namespace {

std::string format_errors(std::string_view source, const std::vector<std::string>& errors) {
  std::string out = std::to_string(errors.size()) + " invalid line(s) in " + std::string(source);
  for (const auto& e : errors) out += "\n  " + e;
  return out;
}

// A line-level schema failure; the message is prefixed with the location later.
struct LineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void allow_keys(const json& j, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) throw LineError("record must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      throw LineError("unknown field '" + key + "'");
  }
}

std::string need_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw LineError(std::string("missing field '") + key + "'");
  if (!it->is_string()) throw LineError(std::string("field '") + key + "' must be a string");
  auto s = it->get<std::string>();
  if (s.empty()) throw LineError(std::string("field '") + key + "' must be nonempty");
  return s;
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return need_string(j, key);
}

// Splits text into lines, runs parse_line on each nonblank one and gathers every
// failure (plus duplicate ids) into a single Data error.
template <typename Record, typename ParseLine>
std::vector<Record> parse_lines(std::string_view text, std::string_view source,
                                ParseLine&& parse_line) {
  std::vector<Record> out;
  std::vector<std::string> errors;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    try {
      Record r = parse_line(json::parse(line));
      if (!ids.insert(r.id).second) {
        errors.push_back(where + "duplicate id '" + r.id + "'");
      } else {
        out.push_back(std::move(r));
      }
    } catch (const json::exception& e) {
      errors.push_back(where + "malformed JSON: " + e.what());
    } catch (const std::exception& e) {
      errors.push_back(where + e.what());
    }
    if (end == text.size()) break;
  }
  if (!errors.empty()) throw Error(ErrorCode::Data, format_errors(source, errors));
  return out;
}

std::optional<nli::Label> read_label(const json& gold, const char* key, nli::LabelSpace space) {
  if (!gold.contains(key)) return std::nullopt;
  const auto& v = gold.at(key);
  if (!v.is_string()) throw LineError(std::string("label '") + key + "' must be a string");
  auto label = nli::parse_label(v.get<std::string>());
  if (!label) throw LineError("illegal label '" + v.get<std::string>() + "' for " + key);
  if (!nli::in_space(*label, space))
    throw LineError("illegal label '" + v.get<std::string>() + "' for " + key + " in " +
                    std::to_string(static_cast<int>(space)) + "-label space");
  return label;
}

constexpr const char* kGoldKeys[] = {"c_h",     "p_h",     "h_c",        "h_cprime",
                                     "c_not_h", "not_c_h", "not_c_not_h"};

NliRecord nli_from_json(const json& j) {
  allow_keys(j, {"id", "context", "hypothesis", "presupposed", "scoped", "neg_context",
                 "neg_hypothesis", "label_space", "gold"});
  NliRecord r;
  r.id = need_string(j, "id");
  r.context = need_string(j, "context");
  r.hypothesis = need_string(j, "hypothesis");
  r.presupposed = opt_string(j, "presupposed");
  r.scoped = opt_string(j, "scoped");
  if (r.presupposed.has_value() != r.scoped.has_value())
    throw LineError("'presupposed' and 'scoped' must be given together");
  r.neg_context = opt_string(j, "neg_context");
  r.neg_hypothesis = opt_string(j, "neg_hypothesis");
  if (!j.contains("label_space")) throw LineError("missing field 'label_space'");
  const auto& space = j.at("label_space");
  if (!space.is_number_integer() || (space.get<int>() != 2 && space.get<int>() != 3))
    throw LineError("'label_space' must be 2 or 3");
  r.label_space = static_cast<nli::LabelSpace>(space.get<int>());
  if (j.contains("gold")) {
    const auto& g = j.at("gold");
    if (!g.is_object()) throw LineError("'gold' must be an object");
    for (const auto& [key, _] : g.items()) {
      if (std::none_of(std::begin(kGoldKeys), std::end(kGoldKeys),
                       [&](const char* k) { return key == k; }))
        throw LineError("unknown gold label '" + key + "'");
    }
    r.gold.c_h = read_label(g, "c_h", r.label_space);
    r.gold.p_h = read_label(g, "p_h", r.label_space);
    r.gold.h_c = read_label(g, "h_c", r.label_space);
    r.gold.h_cprime = read_label(g, "h_cprime", r.label_space);
    r.gold.c_not_h = read_label(g, "c_not_h", r.label_space);
    r.gold.not_c_h = read_label(g, "not_c_h", r.label_space);
    r.gold.not_c_not_h = read_label(g, "not_c_not_h", r.label_space);
  }
  return r;
}

std::size_t count_masks(std::string_view s) {
  std::size_t n = 0;
  for (auto pos = s.find(kMask); pos != std::string_view::npos; pos = s.find(kMask, pos + 1)) ++n;
  return n;
}

AltDistribution candidates_from_json(const json& list, const char* what) {
  if (!list.is_array()) throw LineError(std::string("'") + what + "' must be an array");
  std::vector<Alternative> alts;
  for (const auto& c : list) {
    if (!c.is_object() || !c.contains("token") || !c.contains("prob") ||
        !c.at("token").is_string() || !c.at("prob").is_number())
      throw LineError(std::string("'") + what + "' entries need a string token and numeric prob");
    alts.push_back({c.at("token").get<std::string>(), c.at("prob").get<double>()});
  }
  try {
    return AltDistribution(std::move(alts));
  } catch (const Error& e) {
    throw LineError(std::string("'") + what + "': " + e.what());
  }
}

MkrRecord mkr_from_json(const json& j) {
  allow_keys(j, {"id", "positive", "negative", "gold", "topk"});
  MkrRecord r;
  r.id = need_string(j, "id");
  r.positive = need_string(j, "positive");
  r.negative = need_string(j, "negative");
  for (const auto* prompt : {&r.positive, &r.negative}) {
    const auto n = count_masks(*prompt);
    if (n != 1)
      throw LineError("prompt must contain exactly one " + std::string(kMask) + ", found " +
                      std::to_string(n));
  }
  r.gold = opt_string(j, "gold");
  if (j.contains("topk")) r.topk = candidates_from_json(j.at("topk"), "topk");
  return r;
}

bool has_negation_marker(std::string_view text) {
  static const std::set<std::string> markers{"no", "not", "never", "none", "nobody", "nothing"};
  std::string word;
  auto flush = [&] {
    bool hit = markers.contains(word) || (word.size() > 3 && word.ends_with("n't"));
    word.clear();
    return hit;
  };
  for (char ch : text) {
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '\'') {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    } else if (flush()) {
      return true;
    }
  }
  return flush();
}

QaRecord qa_from_json(const json& j) {
  allow_keys(j, {"id", "context", "question", "polarity", "gold", "positive_context"});
  QaRecord r;
  r.id = need_string(j, "id");
  r.context = need_string(j, "context");
  r.question = need_string(j, "question");
  const auto polarity = need_string(j, "polarity");
  if (polarity == "positive") {
    r.polarity = Polarity::Positive;
  } else if (polarity == "negated") {
    r.polarity = Polarity::Negated;
  } else {
    throw LineError("illegal polarity '" + polarity + "'");
  }
  const auto gold = need_string(j, "gold");
  if (gold == "yes") {
    r.gold = Answer::Yes;
  } else if (gold == "no") {
    r.gold = Answer::No;
  } else {
    throw LineError("illegal answer '" + gold + "'");
  }
  r.positive_context = opt_string(j, "positive_context");
  const bool negated_text = has_negation_marker(r.context);
  if (r.polarity == Polarity::Negated && !negated_text)
    throw LineError("negated record's context carries no negation");
  if (r.polarity == Polarity::Positive && negated_text)
    throw LineError("positive record's context contains a negation");
  if (r.polarity == Polarity::Positive && r.positive_context)
    throw LineError("'positive_context' is only for negated records");
  if (r.positive_context && has_negation_marker(*r.positive_context))
    throw LineError("'positive_context' contains a negation");
  return r;
}

json to_json(const NliRecord& r) {
  json j{{"id", r.id},
         {"context", r.context},
         {"hypothesis", r.hypothesis},
         {"label_space", static_cast<int>(r.label_space)}};
  if (r.presupposed) j["presupposed"] = *r.presupposed;
  if (r.scoped) j["scoped"] = *r.scoped;
  if (r.neg_context) j["neg_context"] = *r.neg_context;
  if (r.neg_hypothesis) j["neg_hypothesis"] = *r.neg_hypothesis;
  json gold = json::object();
  const std::optional<nli::Label>* labels[] = {&r.gold.c_h,     &r.gold.p_h,     &r.gold.h_c,
                                               &r.gold.h_cprime, &r.gold.c_not_h, &r.gold.not_c_h,
                                               &r.gold.not_c_not_h};
  for (std::size_t i = 0; i < std::size(kGoldKeys); ++i) {
    if (*labels[i]) gold[kGoldKeys[i]] = std::string(nli::wire_name(**labels[i]));
  }
  if (!gold.empty()) j["gold"] = gold;
  return j;
}

json to_json(const MkrRecord& r) {
  json j{{"id", r.id}, {"positive", r.positive}, {"negative", r.negative}};
  if (r.gold) j["gold"] = *r.gold;
  if (r.topk) {
    json list = json::array();
    for (const auto& a : r.topk->alternatives()) list.push_back({{"token", a.label}, {"prob", a.prob}});
    j["topk"] = list;
  }
  return j;
}

json to_json(const QaRecord& r) {
  json j{{"id", r.id},
         {"context", r.context},
         {"question", r.question},
         {"polarity", r.polarity == Polarity::Positive ? "positive" : "negated"},
         {"gold", r.gold == Answer::Yes ? "yes" : "no"}};
  if (r.positive_context) j["positive_context"] = *r.positive_context;
  return j;
}

template <typename Record>
std::string jsonl(const std::vector<Record>& records) {
  std::string out;
  for (const auto& r : records) (out += to_json(r).dump()) += '\n';
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  for (;;) {
    const auto tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string_view::npos ? line.npos : tab - pos));
    if (tab == std::string_view::npos) return out;
    pos = tab + 1;
  }
}

}  // namespace

const std::optional<nli::Label>& NliGold::negated(nli::Config c) const {
  switch (c) {
    case nli::Config::C_NotH: return c_not_h;
    case nli::Config::NotC_H: return not_c_h;
    case nli::Config::NotC_NotH: return not_c_not_h;
  }
  return c_not_h;
}

std::vector<NliRecord> parse_nli(std::string_view text, std::string_view source) {
  return parse_lines<NliRecord>(text, source, nli_from_json);
}

std::vector<MkrRecord> parse_mkr(std::string_view text, std::string_view source) {
  return parse_lines<MkrRecord>(text, source, mkr_from_json);
}

std::vector<QaRecord> parse_qa(std::string_view text, std::string_view source) {
  return parse_lines<QaRecord>(text, source, qa_from_json);
}

StringDist parse_stringdist(std::string_view text, std::string_view source) {
  enum class Section { Entries, Pairs, Equiv, Taut } section = Section::Entries;
  StringDist dist;
  std::vector<std::string> errors;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.starts_with("##")) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    if (line.starts_with('#')) {
      if (line == "#pairs") section = Section::Pairs;
      else if (line == "#equiv") section = Section::Equiv;
      else if (line == "#taut") section = Section::Taut;
      else errors.push_back(where + "unknown section header '" + std::string(line) + "'");
      continue;
    }
    const auto fields = split_tabs(line);
    switch (section) {
      case Section::Entries: {
        if (fields.size() != 2 || fields[1].empty()) {
          errors.push_back(where + "expected <probability><TAB><string>");
          break;
        }
        double p = 0;
        const auto* first = fields[0].data();
        const auto* last = first + fields[0].size();
        auto [ptr, ec] = std::from_chars(first, last, p);
        if (ec != std::errc() || ptr != last || !(p >= 0.0 && p <= 1.0)) {
          errors.push_back(where + "invalid probability '" + std::string(fields[0]) + "'");
          break;
        }
        if (!dist.entries.emplace(std::string(fields[1]), p).second)
          errors.push_back(where + "duplicate string '" + std::string(fields[1]) + "'");
        break;
      }
      case Section::Pairs:
        if (fields.size() != 2) {
          errors.push_back(where + "expected <string><TAB><negation>");
          break;
        }
        dist.pairs.emplace_back(std::string(fields[0]), std::string(fields[1]));
        break;
      case Section::Equiv:
        if (fields.size() < 2) {
          errors.push_back(where + "equivalence class needs at least 2 strings");
          break;
        }
        dist.equivalences.emplace_back(fields.begin(), fields.end());
        break;
      case Section::Taut:
        dist.tautologies.emplace_back(line);
        break;
    }
  }
  if (errors.empty()) {
    try {
      dist.validate();
    } catch (const Error& e) {
      errors.push_back(std::string(source) + ": " + e.what());
    }
  }
  if (!errors.empty()) throw Error(ErrorCode::Data, format_errors(source, errors));
  return dist;
}

std::string to_jsonl(const std::vector<NliRecord>& records) { return jsonl(records); }
std::string to_jsonl(const std::vector<MkrRecord>& records) { return jsonl(records); }
std::string to_jsonl(const std::vector<QaRecord>& records) { return jsonl(records); }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

Dataset load_dataset(const std::filesystem::path& path, DatasetKind kind) {
  const std::string text = read_file(path);
  const std::string source = path.string();
  switch (kind) {
    case DatasetKind::Nli: return parse_nli(text, source);
    case DatasetKind::Mkr: return parse_mkr(text, source);
    case DatasetKind::Qa: return parse_qa(text, source);
    case DatasetKind::StringDist: return parse_stringdist(text, source);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown dataset kind");
}

std::vector<QaRecord> generate_syn() {
  struct Schema {
    const char* positive;
    const char* negative;
    const char* question;
  };
  // <col> is substituted with the color.
  static const Schema schemas[] = {
      {"There was a <col> car.", "There was no <col> car.", "Was there a <col> car ?"},
      {"John played with a <col> ball.", "John played with no <col> ball.",
       "Did john play with a <col> ball ?"},
      {"The man was wearing a <col> shirt.", "The man was wearing no <col> shirt.",
       "Did the man wear a <col> shirt ?"},
      {"The house had a <col> window.", "The house had no <col> window.",
       "Did the house have a <col> window ?"},
      {"A <col> glass was on the table.", "No <col> glass was on the table.",
       "Was there a <col> glass on the table?"},
  };
  static const char* colors[] = {"red", "blue", "green", "yellow", "black", "white"};

  auto fill = [](std::string t, const std::string& color) {
    const std::string slot = "<col>";
    for (auto pos = t.find(slot); pos != std::string::npos; pos = t.find(slot, pos))
      t.replace(pos, slot.size(), color);
    return t;
  };

  std::vector<QaRecord> out;
  for (std::size_t s = 0; s < std::size(schemas); ++s) {
    for (const std::string color : colors) {
      const std::string stem = "syn-s" + std::to_string(s + 1) + "-" + color;
      const std::string question = fill(schemas[s].question, color);
      const std::string positive = fill(schemas[s].positive, color);
      out.push_back({stem + "-pos", positive, question, Polarity::Positive, Answer::Yes, {}});
      out.push_back({stem + "-neg", fill(schemas[s].negative, color), question, Polarity::Negated,
                     Answer::No, positive});
    }
  }
  return out;
}

}  // namespace lam
