#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "modelforge/coherent/family.hpp"
#include "modelforge/coherent/square.hpp"
#include "modelforge/errors.hpp"
#include "modelforge/filter/filter.hpp"
#include "modelforge/logic/delta.hpp"
#include "modelforge/logic/formula.hpp"
#include "modelforge/logic/structure.hpp"

namespace modelforge::gen {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

// Every tuple of every relation is in with probability `density`.
inline Structure random_structure(Rng& rng, const Vocabulary& voc, int size, double density = 0.5) {
  Structure m(voc, size);
  for (std::size_t s = 0; s < voc.size(); ++s) {
    const int arity = voc[s].arity;
    Tuple t(static_cast<std::size_t>(arity), 0);
    while (true) {
      if (coin(rng, density)) m.set(s, t);
      int k = arity;
      while (k > 0 && t[static_cast<std::size_t>(k - 1)] == size - 1) t[static_cast<std::size_t>(--k)] = 0;
      if (k == 0) break;
      ++t[static_cast<std::size_t>(k - 1)];
    }
  }
  return m;
}

inline Vocabulary binary_vocabulary(const std::string& name = "R") { return Vocabulary({{name, 2}}); }

// N with M as the induced substructure on {0,…,|M|-1}; the new tuples are random.
inline Structure random_extension(Rng& rng, const Structure& m, int extra, double density = 0.5) {
  Structure n = random_structure(rng, m.vocabulary(), m.size() + extra, density);
  for (std::size_t s = 0; s < m.vocabulary().size(); ++s) {
    const int arity = m.vocabulary()[s].arity;
    Tuple t(static_cast<std::size_t>(arity), 0);
    while (true) {
      n.set(s, t, m.holds(s, t));
      int k = arity;
      while (k > 0 && t[static_cast<std::size_t>(k - 1)] == m.size() - 1) t[static_cast<std::size_t>(--k)] = 0;
      if (k == 0) break;
      ++t[static_cast<std::size_t>(k - 1)];
    }
  }
  return n;
}

// An isomorphic copy of M under a random permutation; `perm[a]` is the image of a.
inline Structure permuted_copy(Rng& rng, const Structure& m, std::vector<Element>* perm_out = nullptr) {
  std::vector<Element> perm(static_cast<std::size_t>(m.size()));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Structure n(m.vocabulary(), m.size());
  for (std::size_t s = 0; s < m.vocabulary().size(); ++s)
    for (auto t : m.tuples(s)) {
      for (auto& a : t) a = perm[static_cast<std::size_t>(a)];
      n.set(s, t);
    }
  if (perm_out) *perm_out = perm;
  return n;
}

// parent[a] < a or -1; depth of every node stays below max_depth.
inline std::vector<int> random_forest(Rng& rng, int size, int max_depth, double root_prob = 0.3) {
  std::vector<int> parent(static_cast<std::size_t>(size), -1), depth(static_cast<std::size_t>(size), 0);
  for (int a = 1; a < size; ++a) {
    if (coin(rng, root_prob)) continue;
    std::vector<int> options;
    for (int p = 0; p < a; ++p)
      if (depth[static_cast<std::size_t>(p)] + 1 < max_depth) options.push_back(p);
    if (options.empty()) continue;
    const int p = options[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(options.size()) - 1))];
    parent[static_cast<std::size_t>(a)] = p;
    depth[static_cast<std::size_t>(a)] = depth[static_cast<std::size_t>(p)] + 1;
  }
  return parent;
}

inline std::vector<int> ancestors(const std::vector<int>& parent, int a) {
  std::vector<int> out;
  for (int p = parent[static_cast<std::size_t>(a)]; p >= 0; p = parent[static_cast<std::size_t>(p)]) out.push_back(p);
  std::sort(out.begin(), out.end());
  return out;
}

// Level 0 ladders are ancestor chains of a random forest and E[0] groups
// nodes by (depth, class of parent, random colour); level 1 has every
// predecessor in the ladder and E[1] is equality. Maps come from complete_maps.
inline SquareWitness two_level_witness(const std::vector<int>& parent, const std::vector<int>& colour) {
  const int l = static_cast<int>(parent.size());
  std::vector<std::vector<std::vector<int>>> C(2, std::vector<std::vector<int>>(static_cast<std::size_t>(l)));
  std::vector<std::vector<int>> E(2, std::vector<int>(static_cast<std::size_t>(l)));
  std::map<std::tuple<int, int, int>, int> keys;
  std::vector<int> depth(static_cast<std::size_t>(l), 0);
  for (int a = 0; a < l; ++a) {
    const auto as = static_cast<std::size_t>(a);
    const int p = parent[as];
    depth[as] = p < 0 ? 0 : depth[static_cast<std::size_t>(p)] + 1;
    C[0][as] = ancestors(parent, a);
    for (int b = 0; b < a; ++b) C[1][as].push_back(b);
    const int pclass = p < 0 ? -1 : E[0][static_cast<std::size_t>(p)];
    auto [it, fresh] = keys.emplace(std::make_tuple(depth[as], pclass, colour[as]), static_cast<int>(keys.size()));
    E[0][as] = it->second;
    E[1][as] = a;
  }
  SquareWitness w(l, 2, std::move(C), std::move(E), {});
  w.complete_maps();
  return w;
}

inline SquareWitness random_two_level_witness(Rng& rng, int l, int colours = 2, int max_depth = 3) {
  auto parent = random_forest(rng, l, max_depth);
  std::vector<int> colour(static_cast<std::size_t>(l));
  for (auto& c : colour) c = uniform(rng, 0, std::max(0, colours - 1));
  return two_level_witness(parent, colour);
}

// Forest 1→0, 3→2 with 0 E[0] 2 and 1 E[0] 3: a valid witness on which
// B ⊆ u^a_t fails for a=3, B={2}, t=tp(0,1,3) although t lies above tp(2,3).
inline SquareWitness coverage_counterexample_witness() { return two_level_witness({-1, 0, -1, 2}, {0, 0, 0, 0}); }

// A proper filter given by `count` random supersets of a random nonempty kernel.
inline FilterOnIndex random_proper_filter(Rng& rng, int n, int count = 2) {
  IndexSet kernel(static_cast<std::size_t>(n));
  while (kernel.none())
    for (int i = 0; i < n; ++i)
      if (coin(rng, 0.5)) kernel.set(static_cast<std::size_t>(i));
  std::vector<IndexSet> gens;
  for (int g = 0; g < std::max(1, count); ++g) {
    IndexSet s = kernel;
    for (int i = 0; i < n; ++i)
      if (coin(rng, 0.5)) s.set(static_cast<std::size_t>(i));
    gens.push_back(s);
  }
  return FilterOnIndex(n, std::move(gens));
}

// `count` random members of D; the cap is the largest multiplicity.
inline RegularityWitness random_regularity_witness(Rng& rng, const FilterOnIndex& d, int count) {
  std::vector<IndexSet> sets;
  for (int a = 0; a < count; ++a) {
    IndexSet s = d.kernel();
    for (int i = 0; i < d.index_size(); ++i)
      if (coin(rng, 0.4)) s.set(static_cast<std::size_t>(i));
    sets.push_back(s);
  }
  int cap = 0;
  for (int i = 0; i < d.index_size(); ++i) {
    int k = 0;
    for (const auto& s : sets) k += s.test(static_cast<std::size_t>(i));
    cap = std::max(cap, k);
  }
  return RegularityWitness(std::move(sets), cap);
}

// Outside the kernel of D each coordinate takes ancestor sets in a random
// forest of depth below its cap; kernel coordinates take all predecessors
// with cap Z. Coherent for D at every bound.
inline CoherentFamily random_coherent_family(Rng& rng, int z, const FilterOnIndex& d, int max_cap = 3) {
  const int n = d.index_size();
  std::vector<int> caps(static_cast<std::size_t>(n));
  std::vector<std::vector<std::vector<int>>> sets(static_cast<std::size_t>(z), std::vector<std::vector<int>>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i) {
    const auto is = static_cast<std::size_t>(i);
    if (d.kernel().test(is)) {
      caps[is] = std::max(z, 1);
      for (int a = 0; a < z; ++a)
        for (int b = 0; b < a; ++b) sets[static_cast<std::size_t>(a)][is].push_back(b);
    } else {
      caps[is] = uniform(rng, 1, std::max(1, max_cap));
      auto parent = random_forest(rng, z, caps[is]);
      for (int a = 0; a < z; ++a) sets[static_cast<std::size_t>(a)][is] = ancestors(parent, a);
    }
  }
  return CoherentFamily(z, n, std::move(caps), std::move(sets));
}

// Random formula over `voc` whose free variables are among x0..x{free-1};
// bound variables start at x{free}.
inline Formula random_formula(Rng& rng, const Vocabulary& voc, int free, int depth, int next_var) {
  const int vars = next_var;
  auto pick_var = [&] { return uniform(rng, 0, std::max(0, vars - 1)); };
  if (depth == 0 || coin(rng, 0.3)) {
    if (voc.size() == 0 || coin(rng, 0.15)) return Formula::equal(pick_var(), pick_var());
    const auto& s = voc[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(voc.size()) - 1))];
    std::vector<int> args;
    for (int k = 0; k < s.arity; ++k) args.push_back(pick_var());
    return Formula::atom(s.name, args);
  }
  switch (uniform(rng, 0, 3)) {
    case 0:
      return Formula::negation(random_formula(rng, voc, free, depth - 1, next_var));
    case 1:
      return Formula::conjunction({random_formula(rng, voc, free, depth - 1, next_var), random_formula(rng, voc, free, depth - 1, next_var)});
    case 2:
      return Formula::disjunction({random_formula(rng, voc, free, depth - 1, next_var), random_formula(rng, voc, free, depth - 1, next_var)});
    default:
      return coin(rng, 0.5) ? Formula::exists(next_var, random_formula(rng, voc, free, depth - 1, next_var + 1))
                            : Formula::forall(next_var, random_formula(rng, voc, free, depth - 1, next_var + 1));
  }
}

// `count` distinct formulas with free variables below max_arity.
inline DeltaSet random_delta(Rng& rng, const Vocabulary& voc, int count, int max_arity, int depth = 2) {
  std::vector<Formula> fs;
  for (int tries = 0; static_cast<int>(fs.size()) < count && tries < 64 * count; ++tries) {
    const int width = uniform(rng, 1, std::max(1, max_arity));
    Formula f = normalize(random_formula(rng, voc, width, depth, width));
    if (std::find(fs.begin(), fs.end(), f) == fs.end()) fs.push_back(std::move(f));
  }
  return DeltaSet(std::move(fs), max_arity);
}

}  // namespace modelforge::gen
