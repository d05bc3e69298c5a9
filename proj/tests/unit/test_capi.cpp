#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <string>
#include <vector>

#include "lam/lam.h"

namespace {

const std::string kData = std::string(LAM_SOURCE_DIR) + "/data/";

struct Str {
  char* p = nullptr;
  ~Str() { lam_free_string(p); }
  std::string str() const { return p ? p : ""; }
};

}  // namespace

TEST_CASE("status names and errors") {
  CHECK(std::string(lam_version()) == "1.0.0");
  CHECK(std::string(lam_status_name(LAM_OK)) == "ok");
  CHECK(std::string(lam_status_name(LAM_ERR_MISSING_ASSIGNMENT)) == "missing_assignment");
  lam_formula* f = nullptr;
  CHECK(lam_formula_parse("a . ", &f) == LAM_ERR_PARSE);
  CHECK(f == nullptr);
  CHECK(std::strlen(lam_last_error()) > 0);
  size_t start = 9, end = 9;
  lam_last_error_span(&start, &end);
  CHECK(start == 4);
  CHECK(lam_formula_parse(nullptr, &f) == LAM_ERR_INVALID_ARGUMENT);
  lam_last_error_span(&start, &end);
  CHECK(start == 0);
  CHECK(end == 0);
  lam_formula_free(nullptr);
  lam_base_free(nullptr);
  lam_structure_free(nullptr);
  lam_free_string(nullptr);
}

TEST_CASE("formulas and bases") {
  lam_formula* f = nullptr;
  REQUIRE(lam_formula_parse("(A . B) => A", &f) == LAM_OK);
  Str text;
  REQUIRE(lam_formula_serialize(f, &text.p) == LAM_OK);
  CHECK(text.str() == "A . B => A");

  lam_base* base = nullptr;
  REQUIRE(lam_base_new(&base) == LAM_OK);
  CHECK(lam_base_set(base, "A", 0.8, nullptr, 0) == LAM_OK);
  const char* ctx[] = {"A"};
  CHECK(lam_base_set(base, "B", 0.5, ctx, 1) == LAM_OK);
  CHECK(lam_base_set(base, "B", 1.5, nullptr, 0) == LAM_ERR_INVALID_ARGUMENT);
  CHECK(lam_base_assign(base, "C=0.25") == LAM_OK);
  CHECK(lam_base_assign(base, "C=") == LAM_ERR_INVALID_ARGUMENT);

  double v = -1;
  CHECK(lam_eval(f, nullptr, 0, base, &v) == LAM_OK);
  CHECK(v == 1.0);
  lam_formula* g = nullptr;
  REQUIRE(lam_formula_parse("not (A . B)", &g) == LAM_OK);
  CHECK(lam_eval(g, nullptr, 0, base, &v) == LAM_OK);
  CHECK(v == doctest::Approx(0.6));
  lam_formula* d = nullptr;
  REQUIRE(lam_formula_parse("D", &d) == LAM_OK);
  CHECK(lam_eval(d, nullptr, 0, base, &v) == LAM_ERR_MISSING_ASSIGNMENT);
  const lam_formula* context[] = {f};
  lam_formula* b = nullptr;
  REQUIRE(lam_formula_parse("B", &b) == LAM_OK);
  lam_formula* a = nullptr;
  REQUIRE(lam_formula_parse("A", &a) == LAM_OK);
  const lam_formula* a_ctx[] = {a};
  CHECK(lam_eval(b, a_ctx, 1, base, &v) == LAM_OK);
  CHECK(v == doctest::Approx(0.5));
  // B has no unconditional entry, so conditioning on a complex item fails.
  CHECK(lam_eval(b, context, 1, base, &v) == LAM_ERR_MISSING_ASSIGNMENT);
  CHECK(lam_base_assign(base, "B=0.3") == LAM_OK);
  CHECK(lam_eval(b, context, 1, base, &v) == LAM_OK);
  CHECK(v == doctest::Approx(0.3));

  CHECK(lam_cond_on_negated(0.4, 0.5, 0.6, &v) == LAM_OK);
  CHECK(v == doctest::Approx(0.5));
  CHECK(lam_cond_on_negated(0.4, 0.5, 1.0, &v) == LAM_ERR_DIVISION_BY_CERTAINTY);
  CHECK(lam_cond_on_negated(0.9, 0.0, 0.5, &v) == LAM_ERR_INCOHERENT_BASE);

  lam_formula_free(a);
  lam_formula_free(b);
  lam_formula_free(d);
  lam_formula_free(g);
  lam_formula_free(f);
  lam_base_free(base);
}

TEST_CASE("structures") {
  lam_structure *s = nullptr, *t = nullptr, *m = nullptr;
  REQUIRE(lam_structure_parse("{x | red(x)}", &s) == LAM_OK);
  REQUIRE(lam_structure_parse("{a, b | car(a), red(b)}", &t) == LAM_OK);
  int found = 0;
  Str mapping;
  CHECK(lam_find_embedding(s, t, 0, &found, &mapping.p) == LAM_OK);
  CHECK(found == 1);
  CHECK(mapping.str() == "x->b");
  REQUIRE(lam_structure_merge(s, t, &m) == LAM_OK);
  Str text;
  CHECK(lam_structure_serialize(m, &text.p) == LAM_OK);
  CHECK(text.str().find("red(x)") != std::string::npos);

  lam_structure* phi = nullptr;
  REQUIRE(lam_structure_parse("{x | car(x), not {| red(x)}}", &phi) == LAM_OK);
  int sat = -1;
  CHECK(lam_check_satisfaction(phi, t, 0, &sat) == LAM_OK);
  CHECK(sat == 1);
  lam_structure* bad = nullptr;
  CHECK(lam_structure_parse("{x | car(y)}", &bad) == LAM_ERR_INVALID_ARGUMENT);
  lam_structure* big = nullptr;
  REQUIRE(lam_structure_parse("{a,b,c,d,e,f,g,h,i,j |}", &big) == LAM_OK);
  lam_structure* many = nullptr;
  REQUIRE(lam_structure_parse("{p,q,r,s,u,v | z(p)}", &many) == LAM_OK);
  CHECK(lam_find_embedding(many, big, 100, &found, nullptr) == LAM_ERR_CAP_EXCEEDED);
  for (auto* x : {s, t, m, phi, big, many}) lam_structure_free(x);
}

TEST_CASE("NLI propagation") {
  lam_pair_labels pl{3, LAM_NLI_ENTAILMENT, LAM_NLI_ENTAILMENT, LAM_NLI_NEUTRAL, LAM_NLI_NEUTRAL};
  lam_config_prediction out[3];
  REQUIRE(lam_nli_snli_scoped(&pl, out) == LAM_OK);
  CHECK(out[0].config == LAM_CFG_C_NOT_H);
  CHECK(out[0].label == LAM_NLI_CONTRADICTION);
  CHECK(out[1].label == LAM_NLI_ENTAILMENT);
  CHECK(out[1].determined == 1);
  CHECK(out[2].label == LAM_NLI_CONTRADICTION);

  pl.p_h = LAM_NLI_UNSET;
  CHECK(lam_nli_snli_scoped(&pl, out) == LAM_ERR_PRECONDITION);
  CHECK(lam_nli_snli_basic(&pl, 0, out) == LAM_OK);

  lam_pair_labels two{2, LAM_NLI_ENTAILMENT, LAM_NLI_UNSET, LAM_NLI_NOT_ENTAILMENT, LAM_NLI_UNSET};
  CHECK(lam_nli_rte_unscoped(&two, out) == LAM_OK);
  CHECK(out[2].label == LAM_NLI_NOT_ENTAILMENT);
  CHECK(lam_nli_rte_scoped(&two, out) == LAM_ERR_PRECONDITION);
  two.c_h = 7;
  CHECK(lam_nli_rte_unscoped(&two, out) == LAM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("adapters and audits") {
  int answer = -1;
  double prob = 0;
  CHECK(lam_qa_answer(1, 0.9, &answer, &prob) == LAM_OK);
  CHECK(answer == 0);
  CHECK(prob == doctest::Approx(0.9));
  CHECK(lam_qa_answer(2, 0.9, &answer, &prob) == LAM_ERR_INVALID_ARGUMENT);

  const char* labels[] = {"Paris", "Toulouse", "Marseille"};
  const double probs[] = {0.8, 0.15, 0.05};
  double flipped[3];
  Str sel;
  CHECK(lam_mkr_rerank(labels, probs, 3, 3, flipped, &sel.p) == LAM_OK);
  CHECK(sel.str() == "Marseille");
  CHECK(flipped[0] == doctest::Approx(0.2));
  CHECK(lam_mkr_rerank(labels, probs, 3, 4, flipped, nullptr) == LAM_ERR_PRECONDITION);

  const double book[] = {0.25, 0.0};
  double margin = 0;
  CHECK(lam_dutch_book_margin(book, 2, &margin) == LAM_OK);
  CHECK(margin == doctest::Approx(0.75));

  const std::vector<double> steps(10, 0.9);
  std::vector<double> curve(10);
  size_t index = 0;
  CHECK(lam_chain_decay(steps.data(), steps.size(), 0.5, curve.data(), &index) == LAM_OK);
  CHECK(index == 7);
  CHECK(lam_chain_decay(steps.data(), steps.size(), 0.01, curve.data(), &index) == LAM_OK);
  CHECK(index == 0);

  Str report;
  CHECK(lam_audit_file((kData + "bets.tsv").c_str(), 0.05, &report.p) == LAM_OK);
  CHECK(report.str().find("\"strong_hallucination\": true") != std::string::npos);
  Str none;
  CHECK(lam_audit_file((kData + "missing.tsv").c_str(), 0.05, &none.p) == LAM_ERR_IO);
}

TEST_CASE("runs") {
  Str syn;
  REQUIRE(lam_generate_syn(&syn.p) == LAM_OK);
  const std::string lines = syn.str();
  CHECK(std::count(lines.begin(), lines.end(), '\n') == 60);

  const std::string cfg = R"({"task":"qa","mode":"lambda","data":")" + kData +
                          R"(syn.jsonl","provider":"fixture:)" + kData + R"(syn.provider.jsonl"})";
  Str report;
  REQUIRE(lam_run_eval(cfg.c_str(), &report.p) == LAM_OK);
  CHECK(report.str().find("\"full_accuracy\": 1.0") != std::string::npos);

  Str bad;
  CHECK(lam_run_eval(R"({"task":"qa","colour":"red"})", &bad.p) == LAM_ERR_INVALID_ARGUMENT);
  CHECK(std::string(lam_last_error()).find("colour") != std::string::npos);
  CHECK(lam_run_eval("{", &bad.p) == LAM_ERR_INVALID_ARGUMENT);
  const std::string broken = R"({"task":"nli","data":")" + kData + R"(syn.jsonl","provider":"gold"})";
  CHECK(lam_run_eval(broken.c_str(), &bad.p) == LAM_ERR_DATA);
}
