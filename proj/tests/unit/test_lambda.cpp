#include <doctest.h>

#include <thread>

#include "lam/audit.hpp"
#include "lam/error.hpp"
#include "lam/lambda.hpp"
#include "lam/propositional.hpp"
#include "oracles.hpp"

using namespace lam;

namespace {

Formula F(const char* text) { return parse_formula(text); }

double E(const char* f, const BaseMeasure& base, std::vector<const char*> ctx = {}) {
  std::vector<Formula> c;
  for (const char* t : ctx) c.push_back(F(t));
  return eval(F(f), c, base);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("negation, sequencing and implication") {
  TableBase b;
  b.set("A", 0.8);
  b.set("B", 0.3);
  b.set("B", 0.5, {"A"});
  CHECK(E("A", b) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(E("not A", b) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(E("A . B", b) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(E("A => B", b) == doctest::Approx(0.6).epsilon(1e-15));  // 1 - 0.8 * 0.5
  CHECK(E("B", b, {"A"}) == doctest::Approx(0.5));
  CHECK(E("B", b, {"C"}) == doctest::Approx(0.3));  // falls back to the unconditional entry
}

TEST_CASE("truth-table closure") {
  TableBase b;
  b.set("A", 0.3);
  b.set("B", 0.6);
  CHECK(E("not (A . not A)", b) == 1.0);
  CHECK(E("A . not A", b) == 0.0);
  CHECK(E("B", b, {"A => B", "A"}) == 1.0);
  CHECK(E("A", b, {"A . B"}) == 1.0);
  CHECK(E("not B", b, {"B"}) == 0.0);
  CHECK(E("Z => Z", b) == 1.0);  // no assignment needed
}

TEST_CASE("complement conditioning") {
  CHECK(cond_on_negated(0.4, 0.5, 0.6) == doctest::Approx(0.5));
  CHECK(cond_on_negated(0.0, 0.3, 0.5) == 0.0);
  CHECK(code_of([] { cond_on_negated(0.5, 0.5, 1.0); }) == ErrorCode::DivisionByCertainty);
  CHECK(code_of([] { cond_on_negated(0.9, 0.0, 0.5); }) == ErrorCode::IncoherentBase);
  CHECK(code_of([] { cond_on_negated(1.5, 0.0, 0.5); }) == ErrorCode::InvalidArgument);

  TableBase b;
  b.set("A", 0.4);
  b.set("K", 0.6);
  b.set("K", 0.5, {"A"});
  CHECK(E("A", b, {"not K"}) == doctest::Approx(0.5));
  b.set("K", 1.0);
  CHECK(code_of([&] { E("A", b, {"not K"}); }) == ErrorCode::DivisionByCertainty);
}

TEST_CASE("errors") {
  TableBase b;
  b.set("A", 0.5);
  CHECK(code_of([&] { E("B", b); }) == ErrorCode::MissingAssignment);
  CHECK(code_of([&] { E("A", b, {"A . not A"}); }) == ErrorCode::Precondition);
  CHECK(code_of([&] { b.set("A", 1.2); }) == ErrorCode::InvalidArgument);
  std::string wide;
  for (int i = 0; i < 17; ++i) wide += (i ? " . x" : "x") + std::to_string(i);
  TableBase many;
  for (int i = 0; i < 17; ++i) many.set("x" + std::to_string(i), 0.5);
  CHECK(code_of([&] { eval(F(wide.c_str()), many); }) == ErrorCode::BoundExceeded);
}

TEST_CASE("property: contexts are sets") {
  oracle::Rng rng(2);
  const std::vector<std::string> atoms{"a", "b", "c"};
  std::size_t compared = 0;
  for (int i = 0; i < 300; ++i) {
    std::vector<double> w(8, 1.0 / 8);
    std::map<std::string, std::vector<std::size_t>> val{{"a", {0, 1, 2, 3}}, {"b", {0, 1, 4, 5}}, {"c", {0, 2, 4, 6}}};
    std::uniform_int_distribution<int> u(1, 9);
    double total = 0;
    for (auto& x : w) total += (x = u(rng));
    for (auto& x : w) x /= total;
    const WorldModelBase base(WorldModel(w, val));
    std::vector<Formula> ctx{oracle::random_formula(rng, atoms, 2), oracle::random_formula(rng, atoms, 2)};
    const auto f = oracle::random_formula(rng, atoms, 3);
    if (is_contradiction(Formula::seq(ctx[0], ctx[1]))) continue;
    const double forward = eval(f, ctx, base);
    std::reverse(ctx.begin(), ctx.end());
    CHECK(eval(f, ctx, base) == doctest::Approx(forward).epsilon(1e-12));
    const std::vector<Formula> merged{Formula::seq(ctx[0], ctx[1])};
    CHECK(eval(f, merged, base) == doctest::Approx(forward).epsilon(1e-12));
    ++compared;
  }
  CHECK(compared > 200);
}

TEST_CASE("property: conditional values match world-model conditioning") {
  oracle::Rng rng(8);
  const std::vector<std::string> atoms{"a", "b", "c"};
  double worst = 0;
  for (int i = 0; i < 2000; ++i) {
    std::vector<double> w(6);
    std::uniform_int_distribution<int> u(1, 8);
    double total = 0;
    for (auto& x : w) total += (x = u(rng));
    for (auto& x : w) x /= total;
    std::map<std::string, std::vector<std::size_t>> val;
    std::bernoulli_distribution coin(0.5);
    for (const auto& a : atoms) {
      auto& v = val[a];
      for (std::size_t k = 0; k < 6; ++k) {
        if (coin(rng)) v.push_back(k);
      }
    }
    const WorldModel wm(w, val);
    oracle::Worlds om{wm.weights(), {}};
    for (const auto& a : atoms) {
      std::vector<bool> t(6, false);
      for (auto k : val[a]) t[k] = true;
      om.truth[a] = t;
    }
    const auto c = oracle::random_formula(rng, atoms, 2);
    const auto f = oracle::random_formula(rng, atoms, 3);
    const double pc = oracle::measure(c, om);
    if (pc <= 0) continue;
    const double want = oracle::measure(Formula::seq(f, c), om) / pc;
    const Formula ctx[] = {c};
    const double got = eval(f, ctx, WorldModelBase(wm));
    worst = std::max(worst, std::abs(got - want));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("evaluation is thread safe") {
  TableBase b;
  b.set("A", 0.7);
  b.set("B", 0.2);
  b.set("B", 0.4, {"A"});
  const double want = E("not (A . B) => B", b);
  std::vector<std::jthread> pool;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 8; ++t) {
    pool.emplace_back([&] {
      for (int i = 0; i < 200; ++i) {
        if (E("not (A . B) => B", b) != want) ++mismatches;
      }
    });
  }
  pool.clear();
  CHECK(mismatches == 0);
}

TEST_CASE("admissibility audit") {
  TableBase b;
  b.set("A", 0.6);
  b.set("B", 0.7);
  b.set("B", 1.0, {"A"});
  b.set("A", 0.9, {"X"});
  b.set("B", 0.5, {"A", "X"});
  b.set("X", 0.5);
  const std::vector<std::vector<Formula>> contexts{{}, {F("X")}};
  const auto bad = check_admissibility(F("A"), F("A . B"), contexts, b);
  CHECK(bad.checked_pairs == 2);
  CHECK_FALSE(bad.monotone_ok);
  REQUIRE(bad.monotone_witness);
  CHECK(bad.monotone_witness->observed == doctest::Approx(0.45));
  CHECK(bad.monotone_witness->bound == doctest::Approx(0.9));
  CHECK(bad.conj_elim_ok);

  const auto fine = check_admissibility(F("A"), F("A . (B => B)"), contexts, b);
  CHECK(fine.monotone_ok);
  CHECK(fine.conj_elim_ok);

  const auto vacuous = check_admissibility(F("X"), F("X . A"), contexts, b);
  CHECK(vacuous.checked_pairs == 0);
  CHECK_THROWS_AS(check_admissibility(F("B"), F("A . B"), contexts, b), Error);
  CHECK(seq_spine(F("a . b . c")).size() == 3);
  CHECK(seq_spine(F("a . (b . c)")).size() == 2);
}
