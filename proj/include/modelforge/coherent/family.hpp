#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "modelforge/errors.hpp"
#include "modelforge/filter/filter.hpp"

namespace modelforge {

// Sets u[ζ][i] ⊆ {0..ζ-1} for ζ < element_count and i < index_size, with a
// cap n[i] per index. Sets are kept sorted and duplicate-free.
class CoherentFamily {
 public:
  CoherentFamily() = default;

  CoherentFamily(int element_count, int index_size, std::vector<int> caps,
                 std::vector<std::vector<std::vector<int>>> sets)
      : z_(element_count), n_(index_size), caps_(std::move(caps)), sets_(std::move(sets)) {
    if (z_ < 1) throw InvalidInput("family needs at least one element");
    if (n_ < 1) throw InvalidInput("family needs a nonempty index set");
    if (static_cast<int>(caps_.size()) != n_) throw InvalidInput("caps length differs from index size");
    if (static_cast<int>(sets_.size()) != z_) throw InvalidInput("sets length differs from element count");
    for (auto& row : sets_) {
      if (static_cast<int>(row.size()) != n_) throw InvalidInput("sets row length differs from index size");
      for (auto& u : row) {
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        for (int x : u)
          if (x < 0 || x >= z_) throw InvalidInput("family member " + std::to_string(x) + " outside 0.." + std::to_string(z_ - 1));
      }
    }
  }

  int element_count() const noexcept { return z_; }
  int index_size() const noexcept { return n_; }
  const std::vector<int>& caps() const noexcept { return caps_; }
  int cap(int i) const { return caps_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& u(int zeta, int i) const {
    return sets_.at(static_cast<std::size_t>(zeta)).at(static_cast<std::size_t>(i));
  }
  const std::vector<std::vector<std::vector<int>>>& sets() const noexcept { return sets_; }

  bool contains(int zeta, int i, int x) const {
    const auto& s = u(zeta, i);
    return std::binary_search(s.begin(), s.end(), x);
  }

  // The family on the first `count` elements.
  CoherentFamily restrict_to(int count) const {
    if (count < 1 || count > z_) throw InvalidInput("restriction size out of range");
    return CoherentFamily(count, n_, caps_, {sets_.begin(), sets_.begin() + count});
  }

  friend bool operator==(const CoherentFamily&, const CoherentFamily&) = default;

 private:
  int z_ = 0;
  int n_ = 0;
  std::vector<int> caps_;
  std::vector<std::vector<std::vector<int>>> sets_;
};

// u[ζ][i] = {0..ζ-1}, n[i] = cap.
inline CoherentFamily initial_segment_family(int element_count, int index_size, int cap) {
  std::vector<std::vector<std::vector<int>>> sets(static_cast<std::size_t>(element_count));
  for (int z = 0; z < element_count; ++z) {
    std::vector<int> seg;
    for (int x = 0; x < z; ++x) seg.push_back(x);
    sets[static_cast<std::size_t>(z)].assign(static_cast<std::size_t>(index_size), seg);
  }
  return CoherentFamily(element_count, index_size, std::vector<int>(static_cast<std::size_t>(index_size), cap),
                        std::move(sets));
}

struct ConditionResult {
  bool ok = true;
  // (i) ζ,i   (ii) ζ,i,x   (iii) ζ followed by B   (iv) ζ,i,γ
  std::vector<int> counterexample;
  std::string detail;
};

struct CoherenceReport {
  ConditionResult bounded;      // (i)
  ConditionResult below;        // (ii)
  ConditionResult covering;     // (iii)
  ConditionResult coherent;     // (iv)
  int b_bound = 0;
  bool ok() const noexcept { return bounded.ok && below.ok && covering.ok && coherent.ok; }
};

namespace detail {

inline std::string join_ints(const std::vector<int>& v) {
  std::string s = "{";
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
  return s + "}";
}

// Calls visit(B) for every B ⊆ {0..z-1} with 1 ≤ |B| ≤ b, by size then lex.
template <typename Visit>
bool for_each_small_subset(int z, int b, Visit&& visit) {
  for (int size = 1; size <= std::min(b, z); ++size) {
    std::vector<int> idx(static_cast<std::size_t>(size));
    for (int k = 0; k < size; ++k) idx[static_cast<std::size_t>(k)] = k;
    while (true) {
      if (!visit(static_cast<const std::vector<int>&>(idx))) return false;
      int k = size - 1;
      while (k >= 0 && idx[static_cast<std::size_t>(k)] == z - size + k) --k;
      if (k < 0) break;
      ++idx[static_cast<std::size_t>(k)];
      for (int j = k + 1; j < size; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return true;
}

}  // namespace detail

// Checks the four conditions on coherent families. Condition (iii) is checked
// for every B ⊆ ζ with |B| ≤ b; the first counterexample found is reported.
inline CoherenceReport check_coherent(const CoherentFamily& f, const FilterOnIndex& d, int b) {
  if (f.index_size() != d.index_size()) throw InvalidInput("family and filter have different index sets");
  if (b < 0) throw InvalidInput("subset bound must be non-negative");
  CoherenceReport r;
  r.b_bound = b;
  const int z = f.element_count(), n = f.index_size();

  for (int zeta = 0; zeta < z && r.bounded.ok; ++zeta)
    for (int i = 0; i < n; ++i)
      if (static_cast<int>(f.u(zeta, i).size()) >= f.cap(i)) {
        r.bounded = {false, {zeta, i},
                     "|u[" + std::to_string(zeta) + "][" + std::to_string(i) + "]| = " +
                         std::to_string(f.u(zeta, i).size()) + " is not below n = " + std::to_string(f.cap(i))};
        break;
      }

  for (int zeta = 0; zeta < z && r.below.ok; ++zeta)
    for (int i = 0; i < n && r.below.ok; ++i)
      for (int x : f.u(zeta, i))
        if (x >= zeta) {
          r.below = {false, {zeta, i, x},
                     std::to_string(x) + " in u[" + std::to_string(zeta) + "][" + std::to_string(i) + "] is not below " +
                         std::to_string(zeta)};
          break;
        }

  for (int zeta = 0; zeta < z && r.covering.ok; ++zeta) {
    detail::for_each_small_subset(zeta, b, [&](const std::vector<int>& set) {
      IndexSet good(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        bool all = true;
        for (int x : set) all = all && f.contains(zeta, i, x);
        if (all) good.set(static_cast<std::size_t>(i));
      }
      if (d.member(good)) return true;
      std::vector<int> ce{zeta};
      ce.insert(ce.end(), set.begin(), set.end());
      r.covering = {false, ce,
                    "{i : " + detail::join_ints(set) + " ⊆ u[" + std::to_string(zeta) + "][i]} = " +
                        detail::join_ints(members(good)) + " is not in the filter"};
      return false;
    });
  }

  for (int zeta = 0; zeta < z && r.coherent.ok; ++zeta)
    for (int i = 0; i < n && r.coherent.ok; ++i) {
      const auto& u = f.u(zeta, i);
      for (int g : u) {
        if (g >= zeta) continue;  // reported under (ii)
        std::vector<int> cut(u.begin(), std::lower_bound(u.begin(), u.end(), g));
        if (f.u(g, i) != cut) {
          r.coherent = {false, {zeta, i, g},
                        "u[" + std::to_string(g) + "][" + std::to_string(i) + "] = " + detail::join_ints(f.u(g, i)) +
                            " differs from u[" + std::to_string(zeta) + "][" + std::to_string(i) + "] ∩ " +
                            std::to_string(g) + " = " + detail::join_ints(cut)};
          break;
        }
      }
    }
  return r;
}

}  // namespace modelforge
