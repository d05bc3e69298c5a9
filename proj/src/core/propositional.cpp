#include "lam/propositional.hpp"

#include <algorithm>

namespace lam {

TruthTable::TruthTable(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.size() > kMaxAtoms)
    throw Error(ErrorCode::BoundExceeded, "truth table over " + std::to_string(atoms_.size()) +
                                              " atoms exceeds the bound of " +
                                              std::to_string(kMaxAtoms));
  rows_ = std::size_t{1} << atoms_.size();
  words_ = (rows_ + 63) / 64;
}

TruthTable TruthTable::covering(std::span<const Formula> formulas) {
  std::vector<std::string> atoms;
  for (const auto& f : formulas) {
    for (auto& a : f.atoms()) {
      if (std::find(atoms.begin(), atoms.end(), a) == atoms.end()) atoms.push_back(std::move(a));
    }
  }
  return TruthTable(std::move(atoms));
}

TruthTable::Bits TruthTable::all() const {
  Bits b(words_, ~std::uint64_t{0});
  if (rows_ % 64 != 0) b.back() = (std::uint64_t{1} << rows_) - 1;
  return b;
}

TruthTable::Bits TruthTable::of(const Formula& f) const {
  switch (f.kind()) {
    case Formula::Kind::Atom: {
      auto it = std::find(atoms_.begin(), atoms_.end(), f.id());
      if (it == atoms_.end())
        throw Error(ErrorCode::InvalidArgument, "atom '" + f.id() + "' not in truth table");
      const auto index = static_cast<std::size_t>(it - atoms_.begin());
      Bits b(words_, 0);
      for (std::size_t row = 0; row < rows_; ++row) {
        if ((row >> index) & 1U) b[row / 64] |= std::uint64_t{1} << (row % 64);
      }
      return b;
    }
    case Formula::Kind::Not: {
      Bits b = of(f.left());
      const Bits mask = all();
      for (std::size_t i = 0; i < words_; ++i) b[i] = ~b[i] & mask[i];
      return b;
    }
    case Formula::Kind::Seq: {
      Bits a = of(f.left());
      const Bits b = of(f.right());
      for (std::size_t i = 0; i < words_; ++i) a[i] &= b[i];
      return a;
    }
    case Formula::Kind::Implies: {
      Bits a = of(f.left());
      const Bits b = of(f.right());
      const Bits mask = all();
      for (std::size_t i = 0; i < words_; ++i) a[i] = (~a[i] | b[i]) & mask[i];
      return a;
    }
  }
  return none();
}

TruthTable::Bits TruthTable::conjunction(std::span<const Formula> formulas) const {
  Bits acc = all();
  for (const auto& f : formulas) {
    const Bits b = of(f);
    for (std::size_t i = 0; i < words_; ++i) acc[i] &= b[i];
  }
  return acc;
}

bool TruthTable::is_zero(const Bits& b) {
  return std::all_of(b.begin(), b.end(), [](std::uint64_t w) { return w == 0; });
}

bool TruthTable::subset(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] & ~b[i]) return false;
  }
  return true;
}

bool TruthTable::disjoint(const Bits& a, const Bits& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] & b[i]) return false;
  }
  return true;
}

bool entails(std::span<const Formula> premises, const Formula& conclusion) {
  std::vector<Formula> all(premises.begin(), premises.end());
  all.push_back(conclusion);
  const auto table = TruthTable::covering(all);
  return TruthTable::subset(table.conjunction(premises), table.of(conclusion));
}

bool is_tautology(const Formula& f) { return entails({}, f); }

bool is_contradiction(const Formula& f) {
  const Formula one[] = {f};
  const auto table = TruthTable::covering(one);
  return TruthTable::is_zero(table.of(f));
}

}  // namespace lam
