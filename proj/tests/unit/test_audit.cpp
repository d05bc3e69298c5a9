#include <doctest.h>

#include "lam/audit.hpp"
#include "lam/error.hpp"
#include "lam/formula.hpp"
#include "oracles.hpp"

using namespace lam;

namespace {

Formula F(const char* text) { return parse_formula(text); }

}  // namespace

TEST_CASE("complement deficits, tautology gaps and divergences") {
  StringDist d;
  d.entries = {{"p", 0.25}, {"not p", 0.0}, {"p or not p", 0.5}, {"a", 0.6}, {"b", 0.88}};
  d.pairs = {{"p", "not p"}};
  d.tautologies = {"p or not p"};
  d.equivalences = {{"a", "b"}};
  const auto r = audit(d);
  CHECK(r.complement_deficits.at(0).deficit == doctest::Approx(0.75));
  CHECK(r.tautology_gaps.at(0).gap == doctest::Approx(0.5));
  CHECK(r.equivalence_divergences.at(0).divergence == doctest::Approx(0.28));
  CHECK(r.strong_hallucination);
  CHECK(r.epsilon == kEmpiricalEpsilon);

  StringDist ok;
  ok.entries = {{"p", 0.7}, {"not p", 0.29}};
  ok.pairs = {{"p", "not p"}};
  CHECK_FALSE(audit(ok).strong_hallucination);
  CHECK(audit(ok, 0.001).strong_hallucination);
  // Overshooting mass counts too.
  ok.entries["not p"] = 0.4;
  CHECK(audit(ok).complement_deficits[0].deficit == doctest::Approx(-0.1));
  CHECK(audit(ok).strong_hallucination);
  CHECK_THROWS_AS(audit(ok, 0.0), Error);
}

TEST_CASE("string distributions must be internally consistent") {
  StringDist d;
  d.entries = {{"p", 0.5}};
  d.pairs = {{"p", "q"}};
  CHECK_THROWS_AS(d.validate(), Error);
  d.pairs.clear();
  d.entries["p"] = 1.5;
  CHECK_THROWS_AS(d.validate(), Error);
}

TEST_CASE("Dutch book margin") {
  CHECK(dutch_book_margin(AltDistribution({{"p", 0.25}, {"not p", 0.0}})) == doctest::Approx(0.75));
  CHECK(dutch_book_margin(AltDistribution({{"p", 0.6}, {"not p", 0.4}})) == 0.0);
  CHECK(dutch_book_margin(AltDistribution({{"p", 0.7}, {"not p", 0.5}})) == 0.0);
}

TEST_CASE("chain decay") {
  const std::vector<double> steps(10, 0.9);
  const auto d = chain_decay(steps, 0.5);
  REQUIRE(d.curve.size() == 10);
  CHECK(d.curve[0] == doctest::Approx(0.9));
  CHECK(d.curve[6] == doctest::Approx(0.4782969));
  CHECK(d.hallucination_index == 7u);
  CHECK_FALSE(chain_decay(std::vector<double>{0.99, 0.99}, 0.5).hallucination_index);
  CHECK_THROWS_AS(chain_decay(std::vector<double>{1.0}, 0.5), Error);
  CHECK_THROWS_AS(chain_decay(std::vector<double>{0.5}, 0.0), Error);
}

TEST_CASE("world models") {
  const WorldModel wm({0.5, 0.3, 0.2}, {{"a", {0, 1}}, {"b", {1, 2}}});
  CHECK(wm.measure(F("a")) == doctest::Approx(0.8));
  CHECK(wm.measure(F("a . b")) == doctest::Approx(0.3));
  CHECK(wm.measure(F("a => b")) == doctest::Approx(0.5));
  CHECK(wm.measure(F("not b")) == doctest::Approx(0.5));
  CHECK_THROWS_AS(wm.measure(F("c")), Error);
  CHECK_THROWS_AS(WorldModel({0.5, 0.4}, {}), Error);
  CHECK_THROWS_AS(WorldModel({1.0}, {{"a", {1}}}), Error);
  CHECK_THROWS_AS(WorldModel({1.5, -0.5}, {}), Error);

  const WorldModelBase base(wm);
  const std::string ctx[] = {"b"};
  CHECK(base.probability("a", ctx) == doctest::Approx(0.6));
  const WorldModelBase null_b(WorldModel({1.0, 0.0}, {{"a", {0}}, {"b", {1}}}));
  CHECK_THROWS_AS(null_b.probability("a", ctx), Error);
}

TEST_CASE("property: world models satisfy the axioms") {
  oracle::Rng rng(12);
  const std::vector<std::string> atoms{"a", "b", "c"};
  for (int i = 0; i < 50; ++i) {
    std::vector<double> w(5);
    std::uniform_int_distribution<int> u(0, 9);
    double total = 0;
    for (auto& x : w) total += (x = u(rng) + 1);
    for (auto& x : w) x /= total;
    std::map<std::string, std::vector<std::size_t>> val;
    std::bernoulli_distribution coin(0.5);
    for (const auto& a : atoms) {
      auto& v = val[a];
      for (std::size_t k = 0; k < 5; ++k) {
        if (coin(rng)) v.push_back(k);
      }
    }
    std::vector<Formula> fs;
    for (int j = 0; j < 12; ++j) fs.push_back(oracle::random_formula(rng, atoms, 3));
    fs.push_back(F("a => a"));
    fs.push_back(F("b . not b"));
    const auto report = axiom_audit(WorldModel(w, val), fs);
    CHECK(report.checks > 0);
    CHECK(report.violations.empty());
  }
}
