#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "modelforge/logic/delta.hpp"
#include "modelforge/logic/formula.hpp"
#include "modelforge/logic/syntax.hpp"

namespace modelforge {

namespace detail {

// Does `target` arise from `pattern` by renaming the free variables of
// `pattern` (not necessarily injectively) and the bound ones consistently?
class InstanceMatcher {
 public:
  bool match(const Formula& pattern, const Formula& target) {
    free_map_.clear();
    return go(pattern, target, {}, {});
  }

 private:
  bool var_ok(int p, int t, const std::map<int, int>& bound, const std::set<int>& target_bound) {
    if (auto it = bound.find(p); it != bound.end()) return it->second == t;
    if (target_bound.count(t)) return false;
    auto [it, inserted] = free_map_.emplace(p, t);
    return inserted || it->second == t;
  }

  bool go(const Formula& p, const Formula& t, const std::map<int, int>& bound, const std::set<int>& target_bound) {
    if (p.kind() != t.kind() || p.symbol() != t.symbol() || p.vars().size() != t.vars().size() ||
        p.children().size() != t.children().size())
      return false;
    if (p.is_quantifier()) {
      auto inner = bound;
      inner[p.bound_var()] = t.bound_var();
      auto inner_t = target_bound;
      inner_t.insert(t.bound_var());
      return go(p.body(), t.body(), inner, inner_t);
    }
    for (std::size_t k = 0; k < p.vars().size(); ++k)
      if (!var_ok(p.vars()[k], t.vars()[k], bound, target_bound)) return false;
    for (std::size_t k = 0; k < p.children().size(); ++k)
      if (!go(p.children()[k], t.children()[k], bound, target_bound)) return false;
    return true;
  }

  std::map<int, int> free_map_;
};

inline void collect_vars(const Formula& f, std::set<int>& out) {
  out.insert(f.vars().begin(), f.vars().end());
  for (const auto& c : f.children()) collect_vars(c, out);
}

}  // namespace detail

// True when `f` is a substitution instance of a formula of `delta` or the
// negation of one.
inline bool is_delta_literal(const Formula& f, const DeltaSet& delta) {
  detail::InstanceMatcher m;
  for (const auto& phi : delta.formulas())
    if (m.match(phi, f)) return true;
  if (f.kind() == Kind::Not)
    for (const auto& phi : delta.formulas())
      if (m.match(phi, f.body())) return true;
  return false;
}

struct FlattenResult {
  std::optional<Formula> formula;
  std::string rejection;  // empty on success

  explicit operator bool() const noexcept { return formula.has_value(); }
};

namespace detail {

// Bound variables renamed by nesting depth, then normalized: equal keys mean
// equal up to α-renaming and operand order.
inline Formula literal_key(const Formula& f) {
  constexpr int kBase = 1 << 20;
  auto go = [&](auto&& self, const Formula& g, int depth) -> Formula {
    switch (g.kind()) {
      case Kind::Atom:
      case Kind::Equal:
        return g;
      case Kind::Not:
        return Formula::negation(self(self, g.body(), depth));
      case Kind::And:
      case Kind::Or: {
        std::vector<Formula> parts;
        for (const auto& c : g.children()) parts.push_back(self(self, c, depth));
        return g.kind() == Kind::And ? Formula::conjunction(std::move(parts)) : Formula::disjunction(std::move(parts));
      }
      case Kind::Exists:
      case Kind::Forall: {
        const int y = kBase + depth;
        Formula body = self(self, rename_free(g.body(), {{g.bound_var(), y}}), depth + 1);
        return g.kind() == Kind::Exists ? Formula::exists(y, body) : Formula::forall(y, body);
      }
    }
    return g;
  };
  return normalize(go(go, f, 0));
}

}  // namespace detail

namespace detail {

// Instances of Δ-formulas (or their negations) over the free variables of
// `conjuncts` whose conjuncts all occur among `conjuncts`, up to α-renaming
// and operand order. Returns the instances and marks the conjuncts they cover.
inline std::vector<Formula> regroup(const std::vector<Formula>& conjuncts, const DeltaSet& delta, std::vector<bool>& covered) {
  std::map<Formula, std::vector<std::size_t>> where;
  std::set<int> vars;
  for (std::size_t k = 0; k < conjuncts.size(); ++k) {
    where[literal_key(conjuncts[k])].push_back(k);
    vars.insert(conjuncts[k].free_vars().begin(), conjuncts[k].free_vars().end());
  }
  const std::vector<int> pool(vars.begin(), vars.end());
  covered.assign(conjuncts.size(), false);
  std::vector<Formula> out;
  for (const auto& phi : delta.formulas()) {
    const auto& fv = phi.free_vars();
    if (pool.empty() && !fv.empty()) continue;
    std::vector<std::size_t> pos(fv.size(), 0);
    while (true) {
      std::map<int, int> sub;
      for (std::size_t k = 0; k < fv.size(); ++k) sub[fv[k]] = pool[pos[k]];
      const Formula inst = rename_free(phi, sub);
      for (const Formula& cand : {inst, Formula::negation(inst)}) {
        const Formula key = literal_key(cand);
        const std::vector<Formula> parts = key.kind() == Kind::And ? key.children() : std::vector<Formula>{key};
        if (!std::all_of(parts.begin(), parts.end(), [&](const Formula& p) { return where.count(p) > 0; })) continue;
        bool useful = false;
        for (const auto& p : parts)
          for (std::size_t k : where.at(p)) {
            useful |= !covered[k];
            covered[k] = true;
          }
        if (useful) out.push_back(cand);
      }
      std::size_t k = pos.size();
      while (k > 0 && pos[k - 1] + 1 == pool.size()) pos[--k] = 0;
      if (k == 0) break;
      ++pos[k - 1];
    }
  }
  return out;
}

}  // namespace detail

// Rewrites a formula built from ±Δ-literals with ∧ and ∃ into the prenex form
// ∃y_1...∃y_k (ℓ_1 ∧ ... ∧ ℓ_r). A bound variable keeps its name unless it is
// already free or bound elsewhere, in which case it gets the least unused index.
// A conjunctive Δ-instance may appear split into its conjuncts (conjunction
// flattens); such conjuncts are regrouped into the instance before descending.
inline FlattenResult flatten_to_weakly_existential(const Formula& f, const DeltaSet& delta) {
  std::set<int> occurring;
  detail::collect_vars(f, occurring);
  std::set<int> taken(f.free_vars().begin(), f.free_vars().end());
  std::vector<int> bound;
  std::vector<Formula> literals;
  std::string rejection;

  auto walk = [&](auto&& self, const Formula& g) -> bool {
    if (is_delta_literal(g, delta)) {
      literals.push_back(g);
      return true;
    }
    if (g.kind() == Kind::Exists) {
      int y = g.bound_var();
      Formula body = g.body();
      if (taken.count(y)) {
        int z = 0;
        while (taken.count(z) || occurring.count(z)) ++z;
        body = rename_free(body, {{y, z}});
        y = z;
      }
      taken.insert(y);
      bound.push_back(y);
      return self(self, body);
    }
    const std::vector<Formula> parts = g.kind() == Kind::And ? g.children() : std::vector<Formula>{g};
    std::vector<bool> covered;
    for (auto& inst : detail::regroup(parts, delta, covered)) literals.push_back(std::move(inst));
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (covered[k]) continue;
      const Formula& c = parts[k];
      if (c.kind() == Kind::Exists || (c.kind() == Kind::And && parts.size() > 1)) {
        if (!self(self, c)) return false;
        continue;
      }
      if (is_delta_literal(c, delta)) {
        literals.push_back(c);
        continue;
      }
      switch (c.kind()) {
        case Kind::Forall:
          rejection = "universal quantifier: " + to_string(c);
          break;
        case Kind::Or:
          rejection = "disjunction: " + to_string(c);
          break;
        default:
          rejection = "not a delta literal: " + to_string(c);
      }
      return false;
    }
    return true;
  };

  if (!walk(walk, f)) return {std::nullopt, rejection};
  Formula out = Formula::conjunction(std::move(literals));
  for (auto it = bound.rbegin(); it != bound.rend(); ++it) out = Formula::exists(*it, out);
  return {out, {}};
}

}  // namespace modelforge
