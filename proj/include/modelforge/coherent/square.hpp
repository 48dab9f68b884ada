#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "modelforge/coherent/family.hpp"
#include "modelforge/errors.hpp"

// Finite square witnesses: a linear order 0 < 1 < ... < l-1 with ladder sets
// C[ζ][a], equivalence relations E[ζ] and maps f[ζ][a][b], for levels ζ < c.

namespace modelforge {

using PartialMap = std::map<int, int>;

class SquareWitness {
 public:
  SquareWitness() = default;

  // `classes[ζ][a]` is any label; two elements are E[ζ]-equivalent iff their
  // labels at level ζ coincide. `maps[ζ]` is keyed by (a, b).
  SquareWitness(int order_size, int level_count, std::vector<std::vector<std::vector<int>>> ladders,
                std::vector<std::vector<int>> classes, std::vector<std::map<std::pair<int, int>, PartialMap>> maps)
      : l_(order_size), c_(level_count), C_(std::move(ladders)), label_(std::move(classes)), f_(std::move(maps)) {
    if (l_ < 1) throw InvalidInput("order size must be positive");
    if (c_ < 1) throw InvalidInput("level count must be positive");
    if (static_cast<int>(C_.size()) != c_ || static_cast<int>(label_.size()) != c_)
      throw InvalidInput("C and E must have one entry per level");
    if (f_.empty()) f_.resize(static_cast<std::size_t>(c_));
    if (static_cast<int>(f_.size()) != c_) throw InvalidInput("f must have one entry per level");
    for (int z = 0; z < c_; ++z) {
      auto& row = C_[static_cast<std::size_t>(z)];
      if (static_cast<int>(row.size()) != l_) throw InvalidInput("C[" + std::to_string(z) + "] has wrong length");
      for (auto& s : row) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        for (int x : s) check_element(x);
      }
      if (static_cast<int>(label_[static_cast<std::size_t>(z)].size()) != l_)
        throw InvalidInput("E[" + std::to_string(z) + "] has wrong length");
      for (const auto& [ab, m] : f_[static_cast<std::size_t>(z)]) {
        check_element(ab.first);
        check_element(ab.second);
        for (auto [x, y] : m) {
          check_element(x);
          check_element(y);
        }
      }
    }
    // Canonical class id: least element carrying the same label.
    cls_.assign(static_cast<std::size_t>(c_), std::vector<int>(static_cast<std::size_t>(l_)));
    for (int z = 0; z < c_; ++z) {
      std::map<int, int> first;
      for (int a = 0; a < l_; ++a) {
        auto [it, fresh] = first.emplace(label_[static_cast<std::size_t>(z)][static_cast<std::size_t>(a)], a);
        cls_[static_cast<std::size_t>(z)][static_cast<std::size_t>(a)] = it->second;
      }
    }
  }

  int order_size() const noexcept { return l_; }
  int level_count() const noexcept { return c_; }
  const std::vector<int>& ladder(int z, int a) const { return C_.at(static_cast<std::size_t>(z)).at(static_cast<std::size_t>(a)); }
  bool in_ladder(int z, int a, int x) const {
    const auto& s = ladder(z, a);
    return std::binary_search(s.begin(), s.end(), x);
  }
  // Least element of the E[z]-class of a.
  int class_id(int z, int a) const { return cls_.at(static_cast<std::size_t>(z)).at(static_cast<std::size_t>(a)); }
  bool equivalent(int z, int a, int b) const { return class_id(z, a) == class_id(z, b); }
  const PartialMap* map(int z, int a, int b) const {
    const auto& level = f_.at(static_cast<std::size_t>(z));
    auto it = level.find({a, b});
    return it == level.end() ? nullptr : &it->second;
  }
  const std::vector<std::map<std::pair<int, int>, PartialMap>>& maps() const noexcept { return f_; }
  const std::vector<std::vector<std::vector<int>>>& ladders() const noexcept { return C_; }
  const std::vector<std::vector<int>>& class_ids() const noexcept { return cls_; }

  // Fills f[ζ][a][b] with the order isomorphism C[ζ][a] → C[ζ][b] for every
  // E[ζ]-equivalent pair whose ladders have equal size and no given map.
  void complete_maps() {
    for (int z = 0; z < c_; ++z)
      for (int a = 0; a < l_; ++a)
        for (int b = 0; b < l_; ++b) {
          if (!equivalent(z, a, b) || map(z, a, b)) continue;
          const auto &ca = ladder(z, a), &cb = ladder(z, b);
          if (ca.size() != cb.size()) continue;
          PartialMap m;
          for (std::size_t k = 0; k < ca.size(); ++k) m.emplace(ca[k], cb[k]);
          f_[static_cast<std::size_t>(z)].emplace(std::make_pair(a, b), std::move(m));
        }
  }

 private:
  void check_element(int x) const {
    if (x < 0 || x >= l_) throw InvalidInput("element " + std::to_string(x) + " outside the order 0.." + std::to_string(l_ - 1));
  }

  int l_ = 0;
  int c_ = 0;
  std::vector<std::vector<std::vector<int>>> C_;
  std::vector<std::vector<int>> label_;
  std::vector<std::map<std::pair<int, int>, PartialMap>> f_;
  std::vector<std::vector<int>> cls_;
};

// One level, E = equality, C[0][a] = {b : b < a}, f = identities.
inline SquareWitness trivial_square_witness(int order_size) {
  std::vector<std::vector<int>> ladders(static_cast<std::size_t>(order_size));
  std::vector<int> labels(static_cast<std::size_t>(order_size));
  for (int a = 0; a < order_size; ++a) {
    labels[static_cast<std::size_t>(a)] = a;
    for (int b = 0; b < a; ++b) ladders[static_cast<std::size_t>(a)].push_back(b);
  }
  SquareWitness w(order_size, 1, {ladders}, {labels}, {});
  w.complete_maps();
  return w;
}

struct AxiomResult {
  bool ok = true;
  std::vector<int> counterexample;
  std::string detail;
};

struct SquareReport {
  static constexpr std::array<const char*, 8> kNames{"i", "ii", "iii", "iv", "v", "vi", "vii", "viii"};
  std::array<AxiomResult, 8> axioms;
  bool ok() const noexcept {
    return std::all_of(axioms.begin(), axioms.end(), [](const AxiomResult& a) { return a.ok; });
  }
};

namespace detail {

inline std::string tuple_text(std::initializer_list<int> xs) {
  std::string s = "(";
  bool first = true;
  for (int x : xs) {
    s += (first ? "" : ",") + std::to_string(x);
    first = false;
  }
  return s + ")";
}

inline bool map_contains(const PartialMap& big, const PartialMap& small) {
  for (auto [x, y] : small) {
    auto it = big.find(x);
    if (it == big.end() || it->second != y) return false;
  }
  return true;
}

}  // namespace detail

// Checks the eight axioms; for each, the first violation found is reported as
// a tuple (level(s) first, then elements).
inline SquareReport check_square_witness(const SquareWitness& w) {
  SquareReport r;
  const int l = w.order_size(), c = w.level_count();
  auto fail = [&](int axiom, std::initializer_list<int> ce, std::string why) {
    auto& slot = r.axioms[static_cast<std::size_t>(axiom)];
    if (!slot.ok) return;
    slot.ok = false;
    slot.counterexample.assign(ce);
    slot.detail = detail::tuple_text(ce) + ": " + std::move(why);
  };

  // (i) increasing union equal to the predecessors
  for (int a = 0; a < l; ++a) {
    std::vector<int> all;
    for (int z = 0; z < c; ++z) {
      for (int x : w.ladder(z, a)) {
        if (x >= a) fail(0, {z, a, x}, "ladder member is not below a");
        if (z + 1 < c && !w.in_ladder(z + 1, a, x)) fail(0, {z, a, x}, "ladder is not increasing in the level");
        all.push_back(x);
      }
    }
    for (int x = 0; x < a; ++x)
      if (std::find(all.begin(), all.end(), x) == all.end()) fail(0, {c - 1, a, x}, "predecessor missing from every ladder");
  }

  // (ii) coherence of ladders
  for (int z = 0; z < c; ++z)
    for (int a = 0; a < l; ++a)
      for (int b : w.ladder(z, a)) {
        std::vector<int> cut;
        for (int x : w.ladder(z, a))
          if (x < b) cut.push_back(x);
        if (w.ladder(z, b) != cut) fail(1, {z, a, b}, "C[z][b] differs from C[z][a] below b");
      }

  // (iii) the class relation is reflexive, symmetric and transitive
  for (int z = 0; z < c; ++z)
    for (int a = 0; a < l; ++a) {
      if (!w.equivalent(z, a, a)) fail(2, {z, a}, "not reflexive");
      for (int b = 0; b < l; ++b) {
        if (w.equivalent(z, a, b) != w.equivalent(z, b, a)) fail(2, {z, a, b}, "not symmetric");
        for (int d = 0; d < l; ++d)
          if (w.equivalent(z, a, b) && w.equivalent(z, b, d) && !w.equivalent(z, a, d))
            fail(2, {z, a, b, d}, "not transitive");
      }
    }

  // (iv) higher levels refine lower ones
  for (int z = 0; z < c; ++z)
    for (int x = z + 1; x < c; ++x)
      for (int a = 0; a < l; ++a)
        for (int b = 0; b < l; ++b)
          if (w.equivalent(x, a, b) && !w.equivalent(z, a, b)) fail(3, {z, x, a, b}, "E at the higher level does not refine");

  // (v) maps are order isomorphisms between ladders respecting E
  for (int z = 0; z < c; ++z)
    for (int a = 0; a < l; ++a)
      for (int b = 0; b < l; ++b) {
        if (!w.equivalent(z, a, b)) continue;
        const PartialMap* m = w.map(z, a, b);
        if (!m) {
          fail(4, {z, a, b}, "no map for an equivalent pair");
          continue;
        }
        const auto &ca = w.ladder(z, a), &cb = w.ladder(z, b);
        std::vector<int> dom, img;
        for (auto [x, y] : *m) {
          dom.push_back(x);
          img.push_back(y);
          if (!w.equivalent(z, x, y)) fail(4, {z, a, b, x}, "d and f(d) are not equivalent");
        }
        if (dom != ca) fail(4, {z, a, b}, "domain is not C[z][a]");
        if (!std::is_sorted(img.begin(), img.end()) || std::adjacent_find(img.begin(), img.end()) != img.end())
          fail(4, {z, a, b}, "map is not strictly order preserving");
        std::sort(img.begin(), img.end());
        if (img != cb) fail(4, {z, a, b}, "image is not C[z][b]");
      }

  // (vi) maps grow with the level
  for (int z = 0; z < c; ++z)
    for (int x = z + 1; x < c; ++x)
      for (int a = 0; a < l; ++a)
        for (int b = 0; b < l; ++b) {
          if (!w.equivalent(x, a, b)) continue;
          const PartialMap *lo = w.map(z, a, b), *hi = w.map(x, a, b);
          if (lo && hi && !detail::map_contains(*hi, *lo)) fail(5, {z, x, a, b}, "lower-level map is not contained");
        }

  // (vii) maps restrict to maps
  for (int z = 0; z < c; ++z)
    for (const auto& [ab, m] : w.maps()[static_cast<std::size_t>(z)])
      for (auto [a1, b1] : m) {
        const PartialMap* inner = w.map(z, a1, b1);
        if (inner && !detail::map_contains(m, *inner))
          fail(6, {z, ab.first, ab.second, a1, b1}, "f[z][a1][b1] is not contained in f[z][a][b]");
      }

  // (viii) ladder members are never equivalent to the top
  for (int z = 0; z < c; ++z)
    for (int b = 0; b < l; ++b)
      for (int a : w.ladder(z, b))
        if (w.equivalent(z, a, b)) fail(7, {z, a, b}, "a in C[z][b] but a E b");
  return r;
}

struct TreeVerdict {
  bool transitive = true;
  bool downward_linear = true;
  std::vector<int> counterexample;  // node triple
  bool ok() const noexcept { return transitive && downward_linear; }
};

// Claims (a) and (b) of the tree-order proposition for a relation given as a
// boolean matrix: transitivity, and comparability of any two nodes below a
// common node.
inline TreeVerdict tree_order_verdict(const std::vector<std::vector<bool>>& less) {
  TreeVerdict v;
  const int n = static_cast<int>(less.size());
  auto lt = [&](int x, int y) { return less[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)]; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int d = 0; d < n; ++d) {
        if (v.transitive && lt(a, b) && lt(b, d) && !lt(a, d)) {
          v.transitive = false;
          if (v.counterexample.empty()) v.counterexample = {a, b, d};
        }
        if (v.downward_linear && lt(a, d) && lt(b, d) && a != b && !lt(a, b) && !lt(b, a)) {
          v.downward_linear = false;
          if (v.counterexample.empty()) v.counterexample = {a, b, d};
        }
      }
  return v;
}

struct LevelsTree {
  std::vector<int> classes;             // class ids (least elements), ascending
  std::vector<std::vector<bool>> less;  // over positions in `classes`
  TreeVerdict verdict;
};

// The E[ζ]-classes ordered by t1 < t2 iff some a1 ∈ t1 lies in C[ζ][a2] for
// some a2 ∈ t2.
inline LevelsTree levels_tree(const SquareWitness& w, int z) {
  if (z < 0 || z >= w.level_count()) throw InvalidInput("level out of range");
  if (!check_square_witness(w).ok()) throw PreconditionFailure("levels_tree needs a witness that passes all axioms");
  LevelsTree t;
  std::map<int, int> pos;
  for (int a = 0; a < w.order_size(); ++a)
    if (w.class_id(z, a) == a) {
      pos[a] = static_cast<int>(t.classes.size());
      t.classes.push_back(a);
    }
  const auto n = t.classes.size();
  t.less.assign(n, std::vector<bool>(n, false));
  for (int a2 = 0; a2 < w.order_size(); ++a2)
    for (int a1 : w.ladder(z, a2))
      t.less[static_cast<std::size_t>(pos[w.class_id(z, a1)])][static_cast<std::size_t>(pos[w.class_id(z, a2)])] = true;
  t.verdict = tree_order_verdict(t.less);
  return t;
}

// ξ(a,b) = least level at which a enters C[·][b].
inline int xi_level(const SquareWitness& w, int a, int b) {
  if (a >= b) throw InvalidInput("xi_level needs a < b");
  for (int z = 0; z < w.level_count(); ++z)
    if (w.in_ladder(z, b, a)) return z;
  throw PreconditionFailure("a never enters a ladder of b");
}

// ξ of an increasing tuple: the maximum of ξ(a_l, a_last). Singletons get 0.
inline int xi_of_tuple(const SquareWitness& w, const std::vector<int>& t) {
  int best = 0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) best = std::max(best, xi_level(w, t[k], t.back()));
  return best;
}

struct PairType {
  int l = 0, m = 0;
  int level = 0;
  int first = 0, second = 0;  // class ids at `level`
  friend auto operator<=>(const PairType&, const PairType&) = default;
};

// tp(ā): length plus one entry per pair of positions l < m, in lex order.
struct TupleType {
  int length = 0;
  std::vector<PairType> entries;
  friend auto operator<=>(const TupleType&, const TupleType&) = default;
};

inline TupleType tuple_type(const SquareWitness& w, const std::vector<int>& t) {
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < 0 || t[k] >= w.order_size()) throw InvalidInput("tuple element outside the order");
    if (k > 0 && t[k - 1] >= t[k]) throw InvalidInput("tuple is not strictly increasing");
  }
  TupleType tp;
  tp.length = static_cast<int>(t.size());
  for (int l = 0; l < tp.length; ++l)
    for (int m = l + 1; m < tp.length; ++m) {
      const int a = t[static_cast<std::size_t>(l)], b = t[static_cast<std::size_t>(m)];
      const int z = xi_level(w, a, b);
      tp.entries.push_back({l, m, z, w.class_id(z, a), w.class_id(z, b)});
    }
  return tp;
}

// Type of the subsequence at the given (increasing) positions.
inline TupleType restrict_type(const TupleType& t, const std::vector<int>& positions) {
  TupleType r;
  r.length = static_cast<int>(positions.size());
  std::vector<int> slot(static_cast<std::size_t>(t.length), -1);
  for (std::size_t k = 0; k < positions.size(); ++k) slot[static_cast<std::size_t>(positions[k])] = static_cast<int>(k);
  for (const auto& e : t.entries) {
    const int l = slot[static_cast<std::size_t>(e.l)], m = slot[static_cast<std::size_t>(e.m)];
    if (l >= 0 && m >= 0) r.entries.push_back({l, m, e.level, e.first, e.second});
  }
  return r;
}

// t1 ≤_Γ t2: some subsequence of a realization of t2 realizes t1. Pair types
// are intrinsic to the pair, so this is decided on the types alone.
inline bool gamma_leq(const TupleType& t1, const TupleType& t2) {
  if (t1.length > t2.length) return false;
  if (t1.length == 0) return true;
  bool found = false;
  detail::for_each_small_subset(t2.length, t1.length, [&](const std::vector<int>& pos) {
    if (static_cast<int>(pos.size()) == t1.length && restrict_type(t2, pos) == t1) found = true;
    return !found;
  });
  return found;
}

}  // namespace modelforge
