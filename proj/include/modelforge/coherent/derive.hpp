#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "modelforge/coherent/family.hpp"
#include "modelforge/coherent/square.hpp"
#include "modelforge/errors.hpp"
#include "modelforge/filter/filter.hpp"

namespace modelforge {

// Positions k of the tuple with b_k E[ξ(b)] a. A valid witness yields at most one.
inline std::vector<int> matching_positions(const SquareWitness& w, const std::vector<int>& b, int a) {
  const int z = xi_of_tuple(w, b);
  std::vector<int> ks;
  for (std::size_t k = 0; k < b.size(); ++k)
    if (w.equivalent(z, b[k], a)) ks.push_back(static_cast<int>(k));
  return ks;
}

// u^a_t computed from one realization b of t: the image of b_0..b_{k-1}
// under f[ξ(b)][b_k][a] when b_k is the position equivalent to a, else ∅.
inline std::vector<int> u_from_realization(const SquareWitness& w, const std::vector<int>& b, int a) {
  const auto ks = matching_positions(w, b, a);
  if (ks.empty()) return {};
  if (ks.size() > 1) throw PreconditionFailure("more than one position of the tuple is equivalent to " + std::to_string(a));
  const int k = ks.front(), z = xi_of_tuple(w, b);
  const PartialMap* f = w.map(z, b[static_cast<std::size_t>(k)], a);
  if (!f) throw PreconditionFailure("witness has no map for an equivalent pair");
  std::vector<int> u;
  for (int l = 0; l < k; ++l) {
    auto it = f->find(b[static_cast<std::size_t>(l)]);
    if (it == f->end()) throw PreconditionFailure("tuple element outside the ladder of b_k");
    if (it->second < a) u.push_back(it->second);
  }
  std::sort(u.begin(), u.end());
  return u;
}

struct DerivedFamily {
  std::vector<TupleType> gamma;             // realized types, ascending
  std::vector<std::vector<int>> realizers;  // lex-least realization of each type
  std::vector<std::vector<bool>> leq;       // ≤_Γ on positions in `gamma`
  std::vector<int> generator_types;         // t* of each generator Γ_{≥t*}
  std::vector<IndexSet> generators;         // generator 0 is the kernel
  int top = 0;                              // position of the least type above all others
  CoherentFamily family;                    // index set Γ
  FilterOnIndex filter;
};

// The family u[a][t] on the realized types of increasing tuples of length at
// most max_length, with caps n_t = length + 1 and the filter generated by the
// up-sets Γ_{≥t*}. Without truncation (max_length = order size) the kernel is
// the type of the whole order.
inline DerivedFamily derive_family(const SquareWitness& w, int max_length = -1) {
  const int l = w.order_size();
  if (max_length < 0) max_length = l;
  if (max_length < 1) throw InvalidInput("maximum tuple length must be positive");
  if (max_length > 16) throw BudgetExceeded("type enumeration is limited to tuples of length 16");
  auto report = check_square_witness(w);
  if (!report.ok()) throw PreconditionFailure("derive_family needs a witness that passes all axioms");

  std::map<TupleType, std::vector<int>> seen;
  detail::for_each_small_subset(l, max_length, [&](const std::vector<int>& t) {
    seen.emplace(tuple_type(w, t), t);
    return true;
  });

  std::vector<TupleType> gamma;
  std::vector<std::vector<int>> realizers;
  std::map<TupleType, int> index;
  for (auto& [t, r] : seen) {
    index.emplace(t, static_cast<int>(gamma.size()));
    gamma.push_back(t);
    realizers.push_back(r);
  }
  const int g = static_cast<int>(gamma.size());

  std::vector<std::vector<bool>> leq(static_cast<std::size_t>(g), std::vector<bool>(static_cast<std::size_t>(g), false));
  for (int t2 = 0; t2 < g; ++t2) {
    const auto& big = gamma[static_cast<std::size_t>(t2)];
    detail::for_each_small_subset(big.length, big.length, [&](const std::vector<int>& pos) {
      auto it = index.find(restrict_type(big, pos));
      if (it != index.end()) leq[static_cast<std::size_t>(it->second)][static_cast<std::size_t>(t2)] = true;
      return true;
    });
  }

  auto upset = [&](int t) {
    IndexSet s(static_cast<std::size_t>(g));
    for (int x = 0; x < g; ++x)
      if (leq[static_cast<std::size_t>(t)][static_cast<std::size_t>(x)]) s.set(static_cast<std::size_t>(x));
    return s;
  };
  IndexSet kernel = full_index_set(g);
  for (int t = 0; t < g; ++t) kernel &= upset(t);
  if (kernel.none())
    throw PreconditionFailure("the up-sets of the truncated type set have empty intersection; "
                              "raise the maximum tuple length to the order size");
  const int top = static_cast<int>(kernel.find_first());

  std::vector<int> gen_types{top};
  std::vector<IndexSet> gens{upset(top)};
  for (int t = 0; t < g; ++t)
    if (t != top) {
      gen_types.push_back(t);
      gens.push_back(upset(t));
    }

  std::vector<int> caps;
  for (const auto& t : gamma) caps.push_back(t.length + 1);
  std::vector<std::vector<std::vector<int>>> sets(static_cast<std::size_t>(l));
  for (int a = 0; a < l; ++a)
    for (int t = 0; t < g; ++t) sets[static_cast<std::size_t>(a)].push_back(u_from_realization(w, realizers[static_cast<std::size_t>(t)], a));

  FilterOnIndex filter(g, gens);
  return {std::move(gamma), std::move(realizers), std::move(leq), std::move(gen_types), std::move(gens), top,
          CoherentFamily(l, g, std::move(caps), std::move(sets)), std::move(filter)};
}

struct CoverageViolation {
  int a = 0;
  std::vector<int> B;
  int type = 0;  // position in Γ
  std::vector<int> u;
};

// Replays the pointwise claim "t ≥_Γ tp(B ∪ {a}) implies B ⊆ u^a_t" for
// every nonempty B below a with |B| ≤ b. Returns the violations found.
inline std::vector<CoverageViolation> check_upset_coverage(const SquareWitness& w, const DerivedFamily& d, int b,
                                                           std::size_t limit = 16) {
  std::vector<CoverageViolation> out;
  std::map<TupleType, int> index;
  for (std::size_t t = 0; t < d.gamma.size(); ++t) index.emplace(d.gamma[t], static_cast<int>(t));
  for (int a = 0; a < w.order_size() && out.size() < limit; ++a) {
    detail::for_each_small_subset(a, b, [&](const std::vector<int>& B) {
      auto tuple = B;
      tuple.push_back(a);
      auto it = index.find(tuple_type(w, tuple));
      if (it == index.end()) return true;  // outside the truncation
      for (std::size_t t = 0; t < d.gamma.size(); ++t) {
        if (!d.leq[static_cast<std::size_t>(it->second)][t]) continue;
        const auto& u = d.family.u(a, static_cast<int>(t));
        if (!std::includes(u.begin(), u.end(), B.begin(), B.end())) {
          out.push_back({a, B, static_cast<int>(t), u});
          if (out.size() >= limit) return false;
        }
      }
      return true;
    });
  }
  return out;
}

class EmptyIntersection : public PreconditionFailure {
 public:
  explicit EmptyIntersection(int index)
      : PreconditionFailure("the generators chosen by index " + std::to_string(index) + " have empty intersection"),
        index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

struct PullbackResult {
  CoherentFamily family;
  std::vector<int> h;
};

// v[ζ][i] = u[ζ][h(i)], n'[i] = n[h(i)], with h(i) the least member of
// ⋂{Z_α : i ∈ A_α}. Witness set α is paired with generator α.
inline PullbackResult pullback(const CoherentFamily& f, const std::vector<IndexSet>& generators,
                               const RegularityWitness& witness, int index_size) {
  if (index_size < 1) throw InvalidInput("index set must be nonempty");
  if (witness.size() > generators.size())
    throw InvalidInput("witness has " + std::to_string(witness.size()) + " sets but only " +
                       std::to_string(generators.size()) + " generators are available");
  for (const auto& z : generators)
    if (static_cast<int>(z.size()) != f.index_size()) throw InvalidInput("generator size differs from the family's index set");
  for (const auto& a : witness.sets())
    if (static_cast<int>(a.size()) != index_size) throw InvalidInput("witness set size differs from the index set");

  std::vector<int> h(static_cast<std::size_t>(index_size));
  for (int i = 0; i < index_size; ++i) {
    IndexSet meet = full_index_set(f.index_size());
    for (int alpha : witness.multiplicity_set(i)) meet &= generators[static_cast<std::size_t>(alpha)];
    if (meet.none()) throw EmptyIntersection(i);
    h[static_cast<std::size_t>(i)] = static_cast<int>(meet.find_first());
  }
  std::vector<int> caps;
  for (int hi : h) caps.push_back(f.cap(hi));
  std::vector<std::vector<std::vector<int>>> sets(static_cast<std::size_t>(f.element_count()));
  for (int z = 0; z < f.element_count(); ++z)
    for (int hi : h) sets[static_cast<std::size_t>(z)].push_back(f.u(z, hi));
  return {CoherentFamily(f.element_count(), index_size, std::move(caps), std::move(sets)), std::move(h)};
}

}  // namespace modelforge
