#include <doctest.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

namespace {

const std::string kData = std::string(LAM_SOURCE_DIR) + "/data/";

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr discarded.
Run run(const std::string& args) {
  const std::string cmd = std::string(LAM_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST_CASE("eval-formula") {
  auto r = run("eval-formula 'not A' --assign A=0.8");
  CHECK(r.code == 0);
  CHECK(r.out == "0.19999999999999996\n");
  r = run("eval-formula 'not (A . not A)'");
  CHECK(r.code == 0);
  CHECK(r.out == "1\n");
  CHECK(run("eval-formula B --ctx 'A => B' --ctx A").out == "1\n");
  CHECK(run("eval-formula B --assign A=0.5").code == 2);
  CHECK(run("eval-formula 'A .'").code == 2);
  CHECK(run("eval-formula A --assign A=7").code == 1);
}

TEST_CASE("usage errors exit 1") {
  CHECK(run("").code == 1);
  CHECK(run("frobnicate").code == 1);
  CHECK(run("eval-nli --provider gold").code == 1);
  CHECK(run("eval-nli --data /nonexistent.jsonl --provider gold").code == 1);
  CHECK(run("eval-nli --data " + kData + "mini_snli.jsonl --provider gold --mode fancy").code == 1);
  CHECK(run("eval-nli --data " + kData + "mini_snli.jsonl --provider smoke-signals").code == 1);
  CHECK(run("audit").code == 1);
  CHECK(run("--version").out == "1.0.0\n");
}

TEST_CASE("eval verbs") {
  auto r = run("eval-nli --data " + kData + "mini_snli.jsonl --provider fixture:" + kData +
               "mini_snli.provider.jsonl");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"full_accuracy\": 0.9722222222222223") != std::string::npos);
  r = run("eval-qa --data " + kData + "syn.jsonl --provider fixture:" + kData +
          "syn.provider.jsonl --mode baseline --parallel 4");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"full_accuracy\": 0.9") != std::string::npos);
  r = run("eval-mkr --data " + kData + "france.jsonl --provider fixture:" + kData +
          "france.provider.jsonl");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"selection\": \"Marseille\"") != std::string::npos);

  const auto out = std::filesystem::temp_directory_path() / "lam_cli_report.json";
  r = run("eval-qa --data " + kData + "syn.jsonl --provider gold --out " + out.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("60 records, 0 skipped, accuracy 1.0") != std::string::npos);
  CHECK(std::filesystem::exists(out));
  std::filesystem::remove(out);
}

TEST_CASE("data and provider failures") {
  // Records of the wrong kind.
  CHECK(run("eval-nli --data " + kData + "syn.jsonl --provider gold").code == 2);
  // Every record skipped because nothing is listening.
  CHECK(run("eval-qa --data " + kData + "syn.jsonl --provider http://127.0.0.1:1 --retries 0 "
            "--backoff-ms 0").code == 3);
  // The fixture does not cover the queries.
  CHECK(run("eval-qa --data " + kData + "syn.jsonl --provider fixture:" + kData +
            "france.provider.jsonl").code == 3);
}

TEST_CASE("gen-syn and audit") {
  auto r = run("gen-syn");
  CHECK(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 60);
  r = run("audit --data " + kData + "weather.tsv");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"strong_hallucination\": true") != std::string::npos);
  r = run("audit --steps 0.9 0.9 0.9 0.9 0.9 0.9 0.9 0.9 --distractor 0.5");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"hallucination_index\": 7") != std::string::npos);
  CHECK(run("audit --steps 1.5").code == 1);
}
