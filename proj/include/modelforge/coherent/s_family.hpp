#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "modelforge/coherent/family.hpp"
#include "modelforge/errors.hpp"
#include "modelforge/filter/index_set.hpp"

namespace modelforge {

// V[α][ζ] ⊆ {0..ζ-1} for α < group count, with caps λ_α.
struct SFamily {
  std::vector<std::vector<std::vector<int>>> V;
  std::vector<int> caps;
};

struct SFamilyReport {
  ConditionResult increasing;  // (1) V[α][ζ] ⊆ V[α+1][ζ]
  ConditionResult exhaustive;  // (1) ⋃_α V[α][ζ] = ζ
  ConditionResult bounded;     // (1) |V[α][ζ]| ≤ λ_α
  ConditionResult coherent;    // (2) ξ ∈ V[α][ζ] ⇒ V[α][ξ] = V[α][ζ] ∩ ξ
  ConditionResult order_type;  // |V[α][ζ]| < λ_α + 1
  // Per group: max_ζ |V[α][ζ]| and |Γ_α|·(max n - 1), a bound that holds
  // whenever every generator is nonempty.
  std::vector<int> max_size;
  std::vector<int> derived_bound;
  bool ok() const noexcept {
    return increasing.ok && exhaustive.ok && bounded.ok && coherent.ok && order_type.ok;
  }
};

struct SFamilyResult {
  SFamily family;
  SFamilyReport report;
};

// Groups Γ_α are lists of generator indices. Preconditions: each group is
// contained in the next, each is closed under intersections of its members'
// generators (up to equality of sets), the last covers every generator, and
// |Γ_α| ≤ λ_α.
inline SFamilyResult derive_s_family(const CoherentFamily& f, const std::vector<IndexSet>& generators,
                                     const std::vector<std::vector<int>>& groups, const std::vector<int>& caps) {
  if (groups.size() != caps.size()) throw InvalidInput("one cap per group is required");
  for (const auto& a : generators)
    if (static_cast<int>(a.size()) != f.index_size()) throw InvalidInput("generator size differs from the index set");
  std::vector<std::vector<int>> gs = groups;
  for (auto& g : gs) {
    for (int x : g)
      if (x < 0 || x >= static_cast<int>(generators.size()))
        throw InvalidInput("group member " + std::to_string(x) + " is not a generator index");
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
  }
  for (std::size_t a = 0; a + 1 < gs.size(); ++a)
    if (!std::includes(gs[a + 1].begin(), gs[a + 1].end(), gs[a].begin(), gs[a].end()))
      throw PreconditionFailure("group " + std::to_string(a) + " is not contained in group " + std::to_string(a + 1));
  for (std::size_t a = 0; a < gs.size(); ++a) {
    if (static_cast<int>(gs[a].size()) > caps[a])
      throw PreconditionFailure("group " + std::to_string(a) + " has more members than its cap");
    for (int x : gs[a])
      for (int y : gs[a]) {
        const IndexSet meet = generators[static_cast<std::size_t>(x)] & generators[static_cast<std::size_t>(y)];
        bool present = std::any_of(gs[a].begin(), gs[a].end(),
                                   [&](int z) { return generators[static_cast<std::size_t>(z)] == meet; });
        if (!present)
          throw PreconditionFailure("group " + std::to_string(a) + " is not closed under intersection: A_" +
                                    std::to_string(x) + " ∩ A_" + std::to_string(y) + " is missing");
      }
  }
  if (!gs.empty())
    for (int x = 0; x < static_cast<int>(generators.size()); ++x)
      if (!std::binary_search(gs.back().begin(), gs.back().end(), x))
        throw PreconditionFailure("generator " + std::to_string(x) + " is in no group");

  const int z = f.element_count(), n = f.index_size();
  const auto groups_n = gs.size();
  SFamilyResult out;
  out.family.caps = caps;
  out.family.V.assign(groups_n, std::vector<std::vector<int>>(static_cast<std::size_t>(z)));
  for (int zeta = 0; zeta < z; ++zeta)
    for (int xi = 0; xi < zeta; ++xi) {
      IndexSet holders(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i)
        if (f.contains(zeta, i, xi)) holders.set(static_cast<std::size_t>(i));
      for (std::size_t a = 0; a < groups_n; ++a)
        if (std::any_of(gs[a].begin(), gs[a].end(),
                        [&](int g) { return generators[static_cast<std::size_t>(g)].is_subset_of(holders); }))
          out.family.V[a][static_cast<std::size_t>(zeta)].push_back(xi);
    }

  auto& r = out.report;
  const auto& V = out.family.V;
  int max_n = 0;
  for (int c : f.caps()) max_n = std::max(max_n, c);
  for (std::size_t a = 0; a < groups_n; ++a) {
    int biggest = 0;
    for (int zeta = 0; zeta < z; ++zeta) biggest = std::max(biggest, static_cast<int>(V[a][static_cast<std::size_t>(zeta)].size()));
    r.max_size.push_back(biggest);
    r.derived_bound.push_back(static_cast<int>(gs[a].size()) * std::max(0, max_n - 1));
  }
  const int alpha_n = static_cast<int>(groups_n);
  for (int zeta = 0; zeta < z; ++zeta) {
    const auto zs = static_cast<std::size_t>(zeta);
    for (int a = 0; a < alpha_n; ++a) {
      const auto as = static_cast<std::size_t>(a);
      const auto& v = V[as][zs];
      if (a + 1 < alpha_n && r.increasing.ok && !std::includes(V[as + 1][zs].begin(), V[as + 1][zs].end(), v.begin(), v.end()))
        r.increasing = {false, {a, zeta}, "V[" + std::to_string(a) + "][" + std::to_string(zeta) + "] not contained in the next group's set"};
      if (r.bounded.ok && static_cast<int>(v.size()) > caps[as])
        r.bounded = {false, {a, zeta}, "|V| = " + std::to_string(v.size()) + " exceeds cap " + std::to_string(caps[as])};
      if (r.order_type.ok && !(static_cast<int>(v.size()) < caps[as] + 1))
        r.order_type = {false, {a, zeta}, "order type bound fails"};
      for (int xi : v) {
        std::vector<int> cut(v.begin(), std::lower_bound(v.begin(), v.end(), xi));
        if (r.coherent.ok && V[as][static_cast<std::size_t>(xi)] != cut)
          r.coherent = {false, {a, zeta, xi},
                        "V[" + std::to_string(a) + "][" + std::to_string(xi) + "] differs from V[" + std::to_string(a) +
                            "][" + std::to_string(zeta) + "] ∩ " + std::to_string(xi)};
      }
    }
    if (r.exhaustive.ok && alpha_n > 0) {
      std::vector<int> all;
      for (int a = 0; a < alpha_n; ++a) all.insert(all.end(), V[static_cast<std::size_t>(a)][zs].begin(), V[static_cast<std::size_t>(a)][zs].end());
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      if (static_cast<int>(all.size()) != zeta)
        r.exhaustive = {false, {zeta}, "union over groups misses part of " + std::to_string(zeta)};
    }
  }
  return out;
}

struct SGroups {
  std::vector<IndexSet> generators;
  std::vector<std::vector<int>> groups;
  std::vector<int> caps;
};

// Generators are the intersection closure of `base` listed in order of
// discovery; group α holds the closure of base[0..α]. λ_α is the derived
// bound |Γ_α|·(max n - 1), raised to |Γ_α| when that is smaller.
inline SGroups standard_s_groups(const CoherentFamily& f, const std::vector<IndexSet>& base) {
  SGroups out;
  int max_n = 0;
  for (int c : f.caps()) max_n = std::max(max_n, c);
  auto add = [&](const IndexSet& s) {
    if (std::find(out.generators.begin(), out.generators.end(), s) != out.generators.end()) return false;
    out.generators.push_back(s);
    return true;
  };
  for (const auto& b : base) {
    if (static_cast<int>(b.size()) != f.index_size()) throw InvalidInput("generator size differs from the index set");
    add(b);
    for (bool grew = true; grew;) {
      grew = false;
      const std::size_t k = out.generators.size();
      for (std::size_t x = 0; x < k; ++x)
        for (std::size_t y = x + 1; y < k; ++y) grew |= add(out.generators[x] & out.generators[y]);
    }
    const int size = static_cast<int>(out.generators.size());
    std::vector<int> g(static_cast<std::size_t>(size));
    std::iota(g.begin(), g.end(), 0);
    out.groups.push_back(std::move(g));
    out.caps.push_back(std::max(size, size * std::max(0, max_n - 1)));
  }
  return out;
}

}  // namespace modelforge
