#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "modelforge/errors.hpp"
#include "modelforge/logic/structure.hpp"

namespace modelforge {

enum class Side : std::uint8_t { M, N };

inline Side other(Side s) noexcept { return s == Side::M ? Side::N : Side::M; }
inline const char* side_name(Side s) noexcept { return s == Side::M ? "M" : "N"; }
inline Side parse_side(const std::string& s) {
  if (s == "M") return Side::M;
  if (s == "N") return Side::N;
  throw InvalidInput("side must be \"M\" or \"N\", got \"" + s + "\"");
}

// One round: I picks `move` on `side`, II answers `reply` on the other side.
template <typename E>
struct BasicRound {
  Side side = Side::M;
  E move{};
  E reply{};

  const E& in_m() const noexcept { return side == Side::M ? move : reply; }
  const E& in_n() const noexcept { return side == Side::M ? reply : move; }
  friend bool operator==(const BasicRound&, const BasicRound&) = default;
};

using Round = BasicRound<Element>;
using GamePosition = std::vector<Round>;
using PartialRelation = std::vector<std::pair<Element, Element>>;

// π ⊆ M × N, sorted and duplicate-free.
template <typename E>
std::vector<std::pair<E, E>> relation_of(const std::vector<BasicRound<E>>& rounds) {
  std::vector<std::pair<E, E>> pi;
  for (const auto& r : rounds) pi.emplace_back(r.in_m(), r.in_n());
  std::sort(pi.begin(), pi.end());
  pi.erase(std::unique(pi.begin(), pi.end()), pi.end());
  return pi;
}

// π is an injective partial map that preserves and reflects every relation
// (and equality) on its domain.
inline bool is_partial_isomorphism(const Structure& m, const Structure& n, const PartialRelation& pi) {
  if (!(m.vocabulary() == n.vocabulary())) throw VocabularyError("structures have different vocabularies");
  for (auto [a, b] : pi)
    if (a < 0 || a >= m.size() || b < 0 || b >= n.size()) throw InvalidInput("relation pairs an element outside a universe");
  for (std::size_t x = 0; x < pi.size(); ++x)
    for (std::size_t y = x + 1; y < pi.size(); ++y)
      if ((pi[x].first == pi[y].first) != (pi[x].second == pi[y].second)) return false;
  // Equality is settled, so the domain can be taken without repetition.
  PartialRelation map;
  for (auto p : pi)
    if (std::none_of(map.begin(), map.end(), [&](auto q) { return q.first == p.first; })) map.push_back(p);
  const std::size_t k = map.size();
  for (std::size_t s = 0; s < m.vocabulary().size(); ++s) {
    const int arity = m.vocabulary()[s].arity;
    if (k == 0) break;
    std::vector<std::size_t> idx(static_cast<std::size_t>(arity), 0);
    Tuple ta(static_cast<std::size_t>(arity)), tb(static_cast<std::size_t>(arity));
    while (true) {
      for (int j = 0; j < arity; ++j) {
        ta[static_cast<std::size_t>(j)] = map[idx[static_cast<std::size_t>(j)]].first;
        tb[static_cast<std::size_t>(j)] = map[idx[static_cast<std::size_t>(j)]].second;
      }
      if (m.holds(s, ta) != n.holds(s, tb)) return false;
      int j = arity;
      while (j > 0 && idx[static_cast<std::size_t>(j - 1)] == k - 1) idx[static_cast<std::size_t>(--j)] = 0;
      if (j == 0) break;
      ++idx[static_cast<std::size_t>(j - 1)];
    }
  }
  return true;
}

}  // namespace modelforge
