#include <doctest.h>

#include <filesystem>
#include <json.hpp>

#include "lam/data.hpp"
#include "lam/error.hpp"

using namespace lam;
using nlohmann::json;

namespace {

const std::filesystem::path kData = std::filesystem::path(LAM_SOURCE_DIR) / "data";

std::string data_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Data);
    return e.what();
  }
  FAIL("expected a Data error");
  return {};
}

std::vector<std::string> lines_of(const std::filesystem::path& p) {
  std::vector<std::string> out;
  const auto text = read_file(p);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    out.push_back(text.substr(pos, end - pos));
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("bundled datasets load") {
  const auto nli = std::get<std::vector<NliRecord>>(load_dataset(kData / "mini_snli.jsonl", DatasetKind::Nli));
  CHECK(nli.size() == 24);
  CHECK(nli[0].has_scope());
  CHECK(nli[0].gold.not_c_h == nli::Label::Entailment);
  CHECK(nli[0].gold.negated(nli::Config::C_NotH) == nli::Label::Contradiction);
  const auto mkr = std::get<std::vector<MkrRecord>>(load_dataset(kData / "mkr_examples.jsonl", DatasetKind::Mkr));
  CHECK(mkr.size() == 9);
  REQUIRE(mkr[0].topk);
  CHECK(mkr[0].topk->size() == 5);
  const auto syn = std::get<std::vector<QaRecord>>(load_dataset(kData / "syn.jsonl", DatasetKind::Qa));
  CHECK(syn.size() == 60);
  const auto bets = std::get<StringDist>(load_dataset(kData / "bets.tsv", DatasetKind::StringDist));
  CHECK(bets.entries.size() == 4);
  CHECK(bets.pairs.size() == 1);
  CHECK(bets.tautologies == std::vector<std::string>{"p∨¬p"});
  const auto weather = std::get<StringDist>(load_dataset(kData / "weather.tsv", DatasetKind::StringDist));
  CHECK(weather.equivalences.size() == 1);
}

TEST_CASE("generated SYN set matches the bundled file") {
  const auto syn = generate_syn();
  REQUIRE(syn.size() == 60);
  CHECK(to_jsonl(syn) == read_file(kData / "syn.jsonl"));
  CHECK(syn[0].id == "syn-s1-red-pos");
  CHECK(syn[1].id == "syn-s1-red-neg");
  CHECK(syn[1].context == "There was no red car.");
  CHECK(syn[1].positive_context == "There was a red car.");
  CHECK(syn[1].gold == Answer::No);
  CHECK(syn[59].context == "No white glass was on the table.");
}

TEST_CASE("to_jsonl round trips") {
  const auto nli = std::get<std::vector<NliRecord>>(load_dataset(kData / "mini_snli.jsonl", DatasetKind::Nli));
  const auto again = parse_nli(to_jsonl(nli));
  REQUIRE(again.size() == nli.size());
  CHECK(to_jsonl(again) == to_jsonl(nli));
  const auto mkr = parse_mkr(read_file(kData / "mkr_examples.jsonl"));
  CHECK(to_jsonl(parse_mkr(to_jsonl(mkr))) == to_jsonl(mkr));
}

TEST_CASE("line errors are aggregated with positions") {
  const std::string text =
      R"({"id":"a","positive":"x [MASK].","negative":"not x [MASK]."})" "\n"
      R"({"id":"b","positive":"no mask","negative":"not [MASK]."})" "\n"
      "\n"
      R"({"id":"a","positive":"y [MASK].","negative":"not y [MASK]."})" "\n"
      R"({"id":"c","positive":"[MASK] [MASK]","negative":"[MASK]"})" "\n"
      "{not json\n";
  const auto msg = data_error([&] { parse_mkr(text, "mem.jsonl"); });
  CHECK(msg.find("4 invalid line(s) in mem.jsonl") != std::string::npos);
  CHECK(msg.find("mem.jsonl:2: prompt must contain exactly one [MASK], found 0") != std::string::npos);
  CHECK(msg.find("mem.jsonl:4: duplicate id 'a'") != std::string::npos);
  CHECK(msg.find("mem.jsonl:5: prompt must contain exactly one [MASK], found 2") != std::string::npos);
  CHECK(msg.find("mem.jsonl:6: malformed JSON") != std::string::npos);
}

TEST_CASE("NLI schema rules") {
  auto base = json::parse(lines_of(kData / "mini_snli.jsonl").at(0));
  auto with = [&](auto mutate) {
    json j = base;
    mutate(j);
    return j.dump();
  };
  CHECK(data_error([&] { parse_nli(with([](json& j) { j["label_space"] = 4; })); })
            .find("'label_space' must be 2 or 3") != std::string::npos);
  CHECK(data_error([&] { parse_nli(with([](json& j) { j["gold"]["c_h"] = "not_entailment"; })); })
            .find("illegal label 'not_entailment' for c_h") != std::string::npos);
  CHECK(data_error([&] { parse_nli(with([](json& j) { j.erase("scoped"); })); })
            .find("must be given together") != std::string::npos);
  CHECK(data_error([&] { parse_nli(with([](json& j) { j["gold"]["x_y"] = "neutral"; })); })
            .find("unknown gold label 'x_y'") != std::string::npos);
  CHECK(data_error([&] { parse_nli(with([](json& j) { j["extra"] = 1; })); })
            .find("unknown field 'extra'") != std::string::npos);
  // Optional parts may be dropped.
  CHECK_NOTHROW(parse_nli(with([](json& j) {
    j.erase("scoped");
    j.erase("presupposed");
    j.erase("neg_context");
    j.erase("gold");
  })));
  const auto two = parse_nli(with([](json& j) {
    j["label_space"] = 2;
    j["gold"] = {{"c_h", "entailment"}, {"h_c", "not_entailment"}};
  }));
  CHECK(two[0].label_space == nli::LabelSpace::Two);
}

TEST_CASE("QA schema rules") {
  const auto lines = lines_of(kData / "syn.jsonl");
  const auto pos = json::parse(lines.at(0));
  const auto neg = json::parse(lines.at(1));
  auto check_msg = [](json j, const char* needle) {
    CHECK(data_error([&] { parse_qa(j.dump()); }).find(needle) != std::string::npos);
  };
  json j = pos;
  j["polarity"] = "negative";
  check_msg(j, "illegal polarity 'negative'");
  j = pos;
  j["gold"] = "maybe";
  check_msg(j, "illegal answer 'maybe'");
  j = pos;
  j["context"] = "There wasn't a red car.";
  check_msg(j, "positive record's context contains a negation");
  j = neg;
  j["context"] = "There was a red car.";
  check_msg(j, "negated record's context carries no negation");
  j = pos;
  j["positive_context"] = "There was a red car.";
  check_msg(j, "only for negated records");
  j = neg;
  j["positive_context"] = "There was never a red car.";
  check_msg(j, "'positive_context' contains a negation");
  j = neg;
  j["context"] = "Nobody saw a red car.";
  CHECK_NOTHROW(parse_qa(j.dump()));
}

TEST_CASE("string distribution format") {
  const auto d = parse_stringdist("## comment\n0.5\ta\n0.5\tnot a\n\n#pairs\na\tnot a\n#taut\na\n");
  CHECK(d.entries.at("not a") == 0.5);
  CHECK(d.pairs.size() == 1);
  CHECK(d.tautologies.size() == 1);
  const auto msg = data_error([] { parse_stringdist("x\ta\n0.5\n#nope\n#pairs\na\tb\n", "d.tsv"); });
  CHECK(msg.find("d.tsv:1: invalid probability 'x'") != std::string::npos);
  CHECK(msg.find("d.tsv:2:") != std::string::npos);
  CHECK(msg.find("d.tsv:3: unknown section header") != std::string::npos);
  CHECK(data_error([] { parse_stringdist("1.5\ta\n"); }).size() > 0);
  CHECK(data_error([] { parse_stringdist("0.5\ta\n#equiv\na\n"); }).find("at least 2") !=
        std::string::npos);
}

TEST_CASE("files") {
  const auto dir = std::filesystem::temp_directory_path() / "lam_test_data";
  std::filesystem::create_directories(dir);
  write_file(dir / "x.txt", "hello\n");
  CHECK(read_file(dir / "x.txt") == "hello\n");
  try {
    read_file(dir / "missing.txt");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
  std::filesystem::remove_all(dir);
}

// Every field of every bundled record, replaced by a value of the wrong shape,
// must turn into a Data error naming the line.
TEST_CASE("property: systematic field corruption is always reported") {
  struct Source {
    const char* file;
    DatasetKind kind;
  };
  const Source sources[] = {{"mini_snli.jsonl", DatasetKind::Nli},
                            {"mkr_examples.jsonl", DatasetKind::Mkr},
                            {"france.jsonl", DatasetKind::Mkr},
                            {"syn.jsonl", DatasetKind::Qa}};
  const json bad_values[] = {42, true, json::object({{"x", 1}}), json::array({1, 2}), nullptr};
  std::size_t corruptions = 0;
  for (const auto& src : sources) {
    const auto lines = lines_of(kData / src.file);
    for (std::size_t i = 0; i < std::min<std::size_t>(lines.size(), 4); ++i) {
      const auto record = json::parse(lines[i]);
      for (const auto& [key, _] : record.items()) {
        for (const auto& bad : bad_values) {
          json j = record;
          j[key] = bad;
          std::string text = "\n" + j.dump() + "\n";
          const auto msg = data_error([&] {
            switch (src.kind) {
              case DatasetKind::Nli: parse_nli(text, "f"); break;
              case DatasetKind::Mkr: parse_mkr(text, "f"); break;
              default: parse_qa(text, "f"); break;
            }
          });
          CHECK_MESSAGE(msg.find("f:2: ") != std::string::npos, key, " -> ", bad.dump(), ": ", msg);
          ++corruptions;
        }
      }
    }
  }
  CHECK(corruptions > 100);
}
