#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modelforge/errors.hpp"
#include "modelforge/logic/evaluate.hpp"
#include "modelforge/logic/formula.hpp"

namespace modelforge {

// Ordered, duplicate-free list of formulas whose free variables lie among
// x_0..x_{max_arity-1}. The index of a formula is its list position.
class DeltaSet {
 public:
  DeltaSet() = default;
  DeltaSet(std::vector<Formula> formulas, int max_arity)
      : formulas_(std::move(formulas)), max_arity_(max_arity) {
    if (max_arity_ < 0) throw InvalidInput("max arity must be non-negative");
    for (std::size_t k = 0; k < formulas_.size(); ++k) {
      for (int v : formulas_[k].free_vars())
        if (v >= max_arity_)
          throw InvalidInput("formula " + std::to_string(k) + " has free variable x" + std::to_string(v) +
                             " beyond declared max arity " + std::to_string(max_arity_));
      for (std::size_t j = 0; j < k; ++j)
        if (formulas_[j] == formulas_[k]) throw InvalidInput("duplicate formula in delta set");
    }
  }

  const std::vector<Formula>& formulas() const noexcept { return formulas_; }
  std::size_t size() const noexcept { return formulas_.size(); }
  const Formula& operator[](std::size_t k) const { return formulas_.at(k); }
  int max_arity() const noexcept { return max_arity_; }

 private:
  std::vector<Formula> formulas_;
  int max_arity_ = 0;
};

// Capture-avoiding simultaneous substitution of free variables:
// x_v becomes x_{renaming.at(v)} for every v in the map.
inline Formula rename_free(const Formula& f, const std::map<int, int>& renaming) {
  if (renaming.empty()) return f;
  int fresh = f.max_var();
  for (auto [from, to] : renaming) fresh = std::max({fresh, from, to});
  ++fresh;

  auto go = [&](auto&& self, const Formula& g, const std::map<int, int>& sub) -> Formula {
    auto image = [&](int v) {
      auto it = sub.find(v);
      return it == sub.end() ? v : it->second;
    };
    switch (g.kind()) {
      case Kind::Atom: {
        std::vector<int> args;
        for (int v : g.vars()) args.push_back(image(v));
        return Formula::atom(g.symbol(), std::move(args));
      }
      case Kind::Equal:
        return Formula::equal(image(g.vars()[0]), image(g.vars()[1]));
      case Kind::Not:
        return Formula::negation(self(self, g.body(), sub));
      case Kind::And:
      case Kind::Or: {
        std::vector<Formula> parts;
        for (const auto& c : g.children()) parts.push_back(self(self, c, sub));
        return g.kind() == Kind::And ? Formula::conjunction(std::move(parts))
                                     : Formula::disjunction(std::move(parts));
      }
      case Kind::Exists:
      case Kind::Forall: {
        const int y = g.bound_var();
        std::map<int, int> inner = sub;
        inner.erase(y);
        int target = y;
        // Rename the binder if it would capture an incoming variable.
        for (int v : g.body().free_vars()) {
          if (v == y) continue;
          auto it = inner.find(v);
          if (it != inner.end() && it->second == y) {
            target = fresh++;
            break;
          }
        }
        if (target != y) inner[y] = target;
        Formula body = self(self, g.body(), inner);
        return g.kind() == Kind::Exists ? Formula::exists(target, body) : Formula::forall(target, body);
      }
    }
    return g;
  };
  return go(go, f, renaming);
}

// The Δ'-type of `tuple`: for each formula in order, the formula itself if it
// holds of the tuple (x_k := tuple[k]) and its negation otherwise.
inline Formula delta_type(const Structure& m, std::span<const Formula> delta, std::span<const Element> tuple) {
  std::vector<Formula> parts;
  parts.reserve(delta.size());
  for (const auto& phi : delta) {
    for (int v : phi.free_vars())
      if (static_cast<std::size_t>(v) >= tuple.size())
        throw InvalidInput("formula " + to_string(phi) + " has free variable x" + std::to_string(v) +
                           " beyond tuple length " + std::to_string(tuple.size()));
    parts.push_back(satisfies(m, phi, tuple) ? phi : Formula::negation(phi));
  }
  return Formula::conjunction(std::move(parts));
}

// All substitution instances of `phi` whose free variables are mapped into
// positions 0..width-1, in lexicographic order of the position vector.
inline std::vector<Formula> placements(const Formula& phi, int width) {
  const auto& fv = phi.free_vars();
  std::vector<Formula> out;
  if (width <= 0) {
    if (fv.empty()) out.push_back(phi);
    return out;
  }
  std::vector<int> pos(fv.size(), 0);
  while (true) {
    std::map<int, int> sub;
    for (std::size_t k = 0; k < fv.size(); ++k) sub[fv[k]] = pos[k];
    out.push_back(rename_free(phi, sub));
    std::size_t k = pos.size();
    while (k > 0 && pos[k - 1] == width - 1) pos[--k] = 0;
    if (k == 0) break;
    ++pos[k - 1];
  }
  return out;
}

// The complete Δ'-type of a tuple: for every formula and every placement of
// its free variables on tuple positions, the instance or its negation.
// This is the type that records φ(a_{ξ_1},...,a_{ξ_k}) for arbitrary
// (possibly repeating, unordered) choices from the tuple.
inline Formula full_delta_type(const Structure& m, std::span<const Formula> delta, std::span<const Element> tuple) {
  std::vector<Formula> parts;
  const int width = static_cast<int>(tuple.size());
  for (const auto& phi : delta)
    for (auto& inst : placements(phi, width))
      parts.push_back(satisfies(m, inst, tuple) ? inst : Formula::negation(inst));
  return Formula::conjunction(std::move(parts));
}

}  // namespace modelforge
