#include <doctest.h>

#include <algorithm>

#include "lam/adapters.hpp"
#include "lam/error.hpp"
#include "oracles.hpp"

using namespace lam;

TEST_CASE("alternative distributions validate their input") {
  CHECK_THROWS_AS(AltDistribution({{"a", 1.2}}), Error);
  CHECK_THROWS_AS(AltDistribution({{"a", 0.2}, {"a", 0.3}}), Error);
  CHECK_THROWS_AS(AltDistribution({{"a", 0.2}, {"b", 0.3}}, true), Error);
  CHECK_NOTHROW(AltDistribution({{"a", 0.7}, {"b", 0.3}}, true));
  const AltDistribution d({{"a", 0.2}, {"b", 0.6}});
  CHECK(d.sum() == doctest::Approx(0.8));
  const auto r = d.renormalized();
  CHECK(r.normalized());
  CHECK(r.alternatives()[0].prob == doctest::Approx(0.25));
  CHECK(r.alternatives()[1].prob == doctest::Approx(0.75));
  CHECK_THROWS_AS(AltDistribution({{"a", 0.0}}).renormalized(), Error);
}

TEST_CASE("QA answers read negated contexts off the positive probability") {
  auto r = qa_answer({"q", Polarity::Positive, 0.9});
  CHECK(r.answer == Answer::Yes);
  CHECK(r.prob == doctest::Approx(0.9));
  r = qa_answer({"q", Polarity::Negated, 0.9});
  CHECK(r.answer == Answer::No);
  CHECK(r.prob == doctest::Approx(0.9));
  CHECK(r.yes_prob == doctest::Approx(0.1));
  CHECK(qa_answer({"q", Polarity::Positive, 0.5}).answer == Answer::No);  // ties go to No
  CHECK(qa_answer({"q", Polarity::Negated, 0.5}).answer == Answer::No);
  CHECK_THROWS_AS(qa_answer({"q", Polarity::Negated, -0.1}), Error);
}

TEST_CASE("masked completion reranking") {
  const AltDistribution d({{"Paris", 0.8}, {"Marseille", 0.05}, {"Toulouse", 0.15}});
  const auto r = mkr_rerank(d, 3);
  CHECK(r.selection == "Marseille");
  CHECK(r.flipped_raw.alternatives()[0].prob == doctest::Approx(0.2));
  CHECK(r.flipped_raw.sum() == doctest::Approx(2.0));
  CHECK(r.flipped_normalized.sum() == doctest::Approx(1.0));
  CHECK(r.flipped_normalized.alternatives()[1].prob == doctest::Approx(0.475));
  // k restricts to the leading alternatives.
  CHECK(mkr_rerank(d, 2).selection == "Marseille");
  CHECK(mkr_rerank(AltDistribution({{"x", 0.6}, {"y", 0.3}, {"z", 0.1}}), 2).selection == "y");
  CHECK_THROWS_AS(mkr_rerank(d, 4), Error);
  CHECK_THROWS_AS(mkr_rerank(d, 1), Error);
  CHECK_THROWS_AS(mkr_rerank(AltDistribution({{"x", 1.0}}), 2), Error);
  // Ties break towards the smallest label.
  CHECK(mkr_rerank(AltDistribution({{"b", 0.5}, {"c", 0.25}, {"a", 0.25}}), 3).selection == "a");
  CHECK(argmax_label(AltDistribution({{"b", 0.4}, {"a", 0.4}})) == "a");
}

TEST_CASE("property: reranking never selects the positive argmax") {
  oracle::Rng rng(41);
  for (int i = 0; i < 2000; ++i) {
    std::uniform_int_distribution<int> n(2, 10);
    const int m = n(rng);
    std::vector<Alternative> alts;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double total = 0;
    for (int j = 0; j < m; ++j) total += alts.emplace_back(Alternative{"w" + std::to_string(j), u(rng)}).prob;
    for (auto& a : alts) a.prob /= total;
    std::sort(alts.begin(), alts.end(), [](const auto& a, const auto& b) { return a.prob > b.prob; });
    if (alts[0].prob == alts[1].prob) continue;
    const AltDistribution d(alts);
    std::uniform_int_distribution<int> kk(2, m);
    const auto k = static_cast<std::size_t>(kk(rng));
    const auto r = mkr_rerank(d, k);
    CHECK(r.selection != alts[0].label);
    for (std::size_t j = 0; j < k; ++j)
      CHECK(r.flipped_raw.alternatives()[j].prob == doctest::Approx(1.0 - alts[j].prob));
  }
}
