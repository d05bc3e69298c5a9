#include "lam/lambda.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "lam/propositional.hpp"

namespace lam {

namespace {

// Below this a conditioning event is treated as null.
constexpr double kNull = 1e-12;

std::mutex& serial_mutex() {
  static std::mutex m;
  return m;
}

void check_unit(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " must lie in [0,1], got " + std::to_string(p));
}

double clamp_unit(double p) { return std::clamp(p, 0.0, 1.0); }

// A conditioning context: positive atoms plus the remaining (operator-bearing)
// items, each kept sorted by canonical text.
struct Context {
  std::vector<std::string> atoms;
  std::vector<std::pair<std::string, Formula>> complex;

  void add(const Formula& f) {
    switch (f.kind()) {
      case Formula::Kind::Atom: {
        auto it = std::lower_bound(atoms.begin(), atoms.end(), f.id());
        if (it == atoms.end() || *it != f.id()) atoms.insert(it, f.id());
        return;
      }
      case Formula::Kind::Seq:
        add(f.left());
        add(f.right());
        return;
      case Formula::Kind::Not:
        if (f.left().kind() == Formula::Kind::Not) return add(f.left().left());
        if (f.left().kind() == Formula::Kind::Implies) {
          add(f.left().left());
          add(Formula::negation(f.left().right()));
          return;
        }
        break;
      case Formula::Kind::Implies:
        break;
    }
    auto key = serialize_formula(f);
    auto it = std::lower_bound(complex.begin(), complex.end(), key,
                               [](const auto& item, const std::string& k) { return item.first < k; });
    if (it == complex.end() || it->first != key) complex.insert(it, {std::move(key), f});
  }

  Context with(const Formula& f) const {
    Context c = *this;
    c.add(f);
    return c;
  }

  std::vector<Formula> items() const {
    std::vector<Formula> out;
    for (const auto& a : atoms) out.push_back(Formula::atom(a));
    for (const auto& [_, f] : complex) out.push_back(f);
    return out;
  }

  std::string key() const {
    std::string k;
    for (const auto& a : atoms) (k += a) += ',';
    k += '|';
    for (const auto& [text, _] : complex) (k += text) += ';';
    return k;
  }
};

class Engine {
public:
  explicit Engine(const BaseMeasure& base) : base_(base), serial_(!base.concurrent_safe()) {}

  double eval(const Formula& f, const Context& ctx) {
    std::string key = serialize_formula(f) + '#' + ctx.key();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const double p = compute(f, ctx);
    memo_.emplace(std::move(key), p);
    return p;
  }

private:
  double compute(const Formula& f, const Context& ctx) {
    // Entailment closure.
    auto items = ctx.items();
    items.push_back(f);
    const auto table = TruthTable::covering(items);
    items.pop_back();
    const auto ctx_bits = table.conjunction(items);
    if (TruthTable::is_zero(ctx_bits))
      throw Error(ErrorCode::Precondition, "conditioning context is unsatisfiable");
    const auto f_bits = table.of(f);
    if (TruthTable::subset(ctx_bits, f_bits)) return 1.0;
    if (TruthTable::disjoint(ctx_bits, f_bits)) return 0.0;

    switch (f.kind()) {
      case Formula::Kind::Atom:
        return atom(f.id(), ctx);
      case Formula::Kind::Not:
        return 1.0 - eval(f.left(), ctx);
      case Formula::Kind::Seq: {
        const double first = eval(f.left(), ctx);
        if (first <= kNull) return 0.0;
        return clamp_unit(first * eval(f.right(), ctx.with(f.left())));
      }
      case Formula::Kind::Implies:
        return 1.0 - eval(Formula::seq(f.left(), Formula::negation(f.right())), ctx);
    }
    return 0.0;
  }

  double atom(const std::string& id, const Context& ctx) {
    if (ctx.complex.empty()) return query(id, ctx.atoms);

    // Peel the last operator-bearing item X off the context and invert:
    // P(a | C0, X) = P(a | C0) P(X | C0, a) / P(X | C0).
    Context rest = ctx;
    const Formula item = rest.complex.back().second;
    rest.complex.pop_back();
    const Formula a = Formula::atom(id);

    const double p_a = eval(a, rest);
    if (p_a <= kNull) return 0.0;
    if (item.kind() == Formula::Kind::Not && item.left().is_atom()) {
      const Formula& k = item.left();
      return cond_on_negated(p_a, eval(k, rest.with(a)), eval(k, rest));
    }
    const double p_item = eval(item, rest);
    if (p_item <= kNull)
      throw Error(ErrorCode::DivisionByCertainty,
                  "conditioning on '" + serialize_formula(item) + "', which has probability 0");
    const double p = p_a * eval(item, rest.with(a)) / p_item;
    if (p > 1.0 + kCoherenceEpsilon)
      throw Error(ErrorCode::IncoherentBase,
                  "P(" + id + " | ..., " + serialize_formula(item) + ") = " + std::to_string(p) +
                      " exceeds 1");
    return clamp_unit(p);
  }

  double query(const std::string& atom, const std::vector<std::string>& context) {
    double p;
    if (serial_) {
      std::lock_guard lock(serial_mutex());
      p = base_.probability(atom, context);
    } else {
      p = base_.probability(atom, context);
    }
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(ErrorCode::IncoherentBase,
                  "base measure returned " + std::to_string(p) + " for '" + atom + "'");
    return p;
  }

  const BaseMeasure& base_;
  bool serial_;
  std::unordered_map<std::string, double> memo_;
};

Context make_context(std::span<const Formula> ctx) {
  Context c;
  for (const auto& f : ctx) c.add(f);
  return c;
}

}  // namespace

void TableBase::set(const std::string& atom, double p, std::vector<std::string> context) {
  check_unit(p, "probability");
  table_[{atom, std::set<std::string>(context.begin(), context.end())}] = p;
}

bool TableBase::has(const std::string& atom) const { return table_.contains({atom, {}}); }

double TableBase::probability(const std::string& atom,
                              std::span<const std::string> context) const {
  auto it = table_.find({atom, std::set<std::string>(context.begin(), context.end())});
  if (it == table_.end()) it = table_.find({atom, {}});
  if (it == table_.end())
    throw Error(ErrorCode::MissingAssignment, "no probability assigned to atom '" + atom + "'");
  return it->second;
}

double cond_on_negated(double p_a3, double p_k_given_a3, double p_k) {
  check_unit(p_a3, "p_a3");
  check_unit(p_k_given_a3, "p_k_given_a3");
  check_unit(p_k, "p_k");
  if (p_k >= 1.0)
    throw Error(ErrorCode::DivisionByCertainty,
                "conditioning on the complement of a certain event");
  const double p = p_a3 * (1.0 - p_k_given_a3) / (1.0 - p_k);
  if (p > 1.0 + kCoherenceEpsilon)
    throw Error(ErrorCode::IncoherentBase,
                "complement conditioning yields " + std::to_string(p) +
                    "; inputs violate joint-probability constraints");
  return std::min(p, 1.0);
}

double eval(const Formula& f, std::span<const Formula> ctx, const BaseMeasure& base) {
  return Engine(base).eval(f, make_context(ctx));
}

double eval(const Formula& f, const BaseMeasure& base) { return eval(f, {}, base); }

std::vector<Formula> seq_spine(const Formula& f) {
  if (f.kind() != Formula::Kind::Seq) return {f};
  auto spine = seq_spine(f.left());
  spine.push_back(f.right());
  return spine;
}

AdmissibilityReport check_admissibility(const Formula& a1, const Formula& a2,
                                        std::span<const std::vector<Formula>> contexts,
                                        const BaseMeasure& base) {
  const auto prefix = seq_spine(a1);
  const auto spine = seq_spine(a2);
  if (prefix.size() > spine.size() || !std::equal(prefix.begin(), prefix.end(), spine.begin()))
    throw Error(ErrorCode::Precondition, "'" + serialize_formula(a1) +
                                             "' is not a prefix of '" + serialize_formula(a2) + "'");

  AdmissibilityReport report;
  const Formula given_a1[] = {a1};
  const double gamma = eval(a2, given_a1, base);
  if (std::abs(gamma - 1.0) <= kCoherenceEpsilon) {
    for (const auto& ctx : contexts) {
      ++report.checked_pairs;
      const double p2 = eval(a2, ctx, base);
      const double p1 = eval(a1, ctx, base);
      if (p2 < p1 - kCoherenceEpsilon && report.monotone_ok) {
        report.monotone_ok = false;
        report.monotone_witness =
            AdmissibilityWitness{ctx, p2, p1, "continuation less probable than its prefix"};
      }
    }
  }

  const Formula given_a2[] = {a2};
  std::vector<Formula> conclusions{a1};
  for (const auto& part : spine) conclusions.push_back(Formula::seq(a1, part));
  for (const auto& c : conclusions) {
    ++report.conj_elim_checked;
    const double p = eval(c, given_a2, base);
    if (std::abs(p - 1.0) > kCoherenceEpsilon && report.conj_elim_ok) {
      report.conj_elim_ok = false;
      report.conj_elim_witness = AdmissibilityWitness{
          {a2}, p, 1.0, "conjunction elimination fails for '" + serialize_formula(c) + "'"};
    }
  }
  return report;
}

}  // namespace lam
