#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lam/formula.hpp"

namespace lam {

// Truth tables over a fixed atom list, one bit per valuation. Seq is read as
// conjunction and `a => b` as `not (a . not b)`.
class TruthTable {
public:
  static constexpr std::size_t kMaxAtoms = 16;

  // Throws BoundExceeded beyond kMaxAtoms atoms.
  explicit TruthTable(std::vector<std::string> atoms);

  // Atom list covering every formula given, with the same bound.
  static TruthTable covering(std::span<const Formula> formulas);

  using Bits = std::vector<std::uint64_t>;

  Bits of(const Formula& f) const;
  Bits all() const;
  Bits none() const { return Bits(words_, 0); }
  Bits conjunction(std::span<const Formula> formulas) const;

  static bool is_zero(const Bits& b);
  static bool subset(const Bits& a, const Bits& b);
  static bool disjoint(const Bits& a, const Bits& b);

  const std::vector<std::string>& atoms() const { return atoms_; }

private:
  std::vector<std::string> atoms_;
  std::size_t rows_ = 1;
  std::size_t words_ = 1;
};

bool entails(std::span<const Formula> premises, const Formula& conclusion);
bool is_tautology(const Formula& f);
bool is_contradiction(const Formula& f);

}  // namespace lam
