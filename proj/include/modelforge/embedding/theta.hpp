#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "modelforge/coherent/family.hpp"
#include "modelforge/errors.hpp"
#include "modelforge/filter/filter.hpp"
#include "modelforge/logic/delta.hpp"
#include "modelforge/logic/structure.hpp"

namespace modelforge {

// Δ_i = {φ_α : i ∈ A_α}, as lists of α in increasing order.
inline std::vector<std::vector<int>> delta_partition(const DeltaSet& delta, const RegularityWitness& w, int index_size) {
  if (w.size() != delta.size())
    throw InvalidInput("delta set has " + std::to_string(delta.size()) + " formulas but the witness has " +
                       std::to_string(w.size()) + " sets");
  for (const auto& a : w.sets())
    if (static_cast<int>(a.size()) != index_size) throw InvalidInput("witness set size differs from the index set");
  std::vector<std::vector<int>> out(static_cast<std::size_t>(index_size));
  for (int i = 0; i < index_size; ++i) out[static_cast<std::size_t>(i)] = w.multiplicity_set(i);
  return out;
}

namespace detail {

// Sorted, duplicate-free conjunction; operands must already be normalized.
inline Formula sorted_conjunction(std::vector<Formula> parts) {
  Formula flat = Formula::conjunction(std::move(parts));
  if (flat.kind() != Kind::And) return flat;
  std::vector<Formula> ops = flat.children();
  std::sort(ops.begin(), ops.end());
  ops.erase(std::unique(ops.begin(), ops.end()), ops.end());
  return Formula::conjunction(std::move(ops));
}

}  // namespace detail

// The θ-formulas of one index i over all ζ. θ^ζ has free variables
// x_0..x_m, m = |u[ζ][i]|, standing for (a_ξ : ξ ∈ u[ζ][i]) followed by a_ζ.
class ThetaLadder {
 public:
  ThetaLadder(const Structure& m, const CoherentFamily& f, int i, std::vector<Formula> delta_i)
      : m_(&m), f_(&f), i_(i), delta_(std::move(delta_i)), theta_(static_cast<std::size_t>(f.element_count())) {
    if (f.element_count() != m.size()) throw InvalidInput("family element count differs from the size of M");
    if (i < 0 || i >= f.index_size()) throw InvalidInput("index out of range");
  }

  int index() const noexcept { return i_; }
  const std::vector<Formula>& delta() const noexcept { return delta_; }

  // m^ζ_i
  int m(int zeta) const { return static_cast<int>(f_->u(zeta, i_).size()); }

  // The tuple (a_ξ : ξ ∈ u[ζ][i]) ⌢ a_ζ.
  Tuple tuple(int zeta) const {
    Tuple t(f_->u(zeta, i_).begin(), f_->u(zeta, i_).end());
    t.push_back(zeta);
    return t;
  }

  // ε with u[ε][i] = u[ζ][i] ∪ {ζ}, ascending.
  std::vector<int> extensions(int zeta) const {
    auto target = f_->u(zeta, i_);
    target.insert(std::upper_bound(target.begin(), target.end(), zeta), zeta);
    std::vector<int> out;
    for (int e = 0; e < f_->element_count(); ++e)
      if (f_->u(e, i_) == target) out.push_back(e);
    return out;
  }

  // θ̄^ζ_i as a normalized conjunction.
  Formula type_part(int zeta) const {
    const Tuple t = tuple(zeta);
    return normalize(full_delta_type(*m_, delta_, t));
  }

  // Downward induction on m: the base case applies when m = n[i] or no
  // extension exists; otherwise θ̄ is conjoined with ∃x_{m+1} θ^ε for every
  // extension ε.
  const Formula& theta(int zeta) {
    auto& slot = theta_.at(static_cast<std::size_t>(zeta));
    if (slot) return *slot;
    const int mz = m(zeta);
    if (mz > f_->cap(i_)) throw PreconditionFailure("recursion depth exceeds n[" + std::to_string(i_) + "]");
    std::vector<Formula> parts{type_part(zeta)};
    if (mz < f_->cap(i_))
      for (int e : extensions(zeta)) {
        if (e <= zeta) throw PreconditionFailure("extension " + std::to_string(e) + " is not above " + std::to_string(zeta));
        parts.push_back(Formula::exists(mz + 1, theta(e)));
      }
    slot = detail::sorted_conjunction(std::move(parts));
    return *slot;
  }

  bool is_base_case(int zeta) const { return m(zeta) == f_->cap(i_) || extensions(zeta).empty(); }

  // Number of distinct θ^ζ_i over all ζ.
  std::size_t distinct_count() {
    std::vector<Formula> all;
    for (int z = 0; z < f_->element_count(); ++z) all.push_back(theta(z));
    std::sort(all.begin(), all.end());
    return static_cast<std::size_t>(std::unique(all.begin(), all.end()) - all.begin());
  }

 private:
  const Structure* m_;
  const CoherentFamily* f_;
  int i_;
  std::vector<Formula> delta_;
  std::vector<std::optional<Formula>> theta_;
};

inline std::vector<Formula> select_formulas(const DeltaSet& delta, const std::vector<int>& indices) {
  std::vector<Formula> out;
  for (int a : indices) out.push_back(delta[static_cast<std::size_t>(a)]);
  return out;
}

// θ^ζ_i for one (i, ζ).
inline Formula build_theta(int i, int zeta, const CoherentFamily& f, const std::vector<Formula>& delta_i, const Structure& m) {
  if (zeta < 0 || zeta >= f.element_count()) throw InvalidInput("element out of range");
  ThetaLadder ladder(m, f, i, delta_i);
  return ladder.theta(zeta);
}

}  // namespace modelforge
