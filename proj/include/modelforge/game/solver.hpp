#pragma once

#include <algorithm>
#include <atomic>
#include <compare>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "modelforge/errors.hpp"
#include "modelforge/game/position.hpp"
#include "modelforge/logic/structure.hpp"

namespace modelforge {

struct StrategyKey {
  PartialRelation pi;  // sorted, duplicate-free
  int played = 0;
  Side side = Side::M;
  Element move = 0;
  friend auto operator<=>(const StrategyKey&, const StrategyKey&) = default;
};

// A policy for II as an explicit table keyed by normalized positions.
class Strategy {
 public:
  Strategy() = default;
  Strategy(int m_size, int n_size, int scope) : m_size_(m_size), n_size_(n_size), scope_(scope) {}

  int m_size() const noexcept { return m_size_; }
  int n_size() const noexcept { return n_size_; }
  // Number of rounds the table covers.
  int scope() const noexcept { return scope_; }
  const std::map<StrategyKey, Element>& table() const noexcept { return table_; }

  void set(StrategyKey key, Element reply) { table_[std::move(key)] = reply; }

  std::optional<Element> reply(const GamePosition& pos, Side side, Element move) const {
    auto it = table_.find({relation_of(pos), static_cast<int>(pos.size()), side, move});
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }

  friend bool operator==(const Strategy&, const Strategy&) = default;

 private:
  int m_size_ = 0;
  int n_size_ = 0;
  int scope_ = 0;
  std::map<StrategyKey, Element> table_;
};

namespace detail {

// Builds a table by walking every position reachable under `choose`, which
// returns II's reply (or nullopt to leave the entry out).
template <typename Choose>
Strategy tabulate(int m_size, int n_size, int rounds, Choose&& choose) {
  Strategy s(m_size, n_size, rounds);
  std::map<std::pair<PartialRelation, int>, bool> visited;
  auto walk = [&](auto&& self, GamePosition& pos) -> void {
    if (static_cast<int>(pos.size()) == rounds) return;
    if (!visited.emplace(std::make_pair(relation_of(pos), static_cast<int>(pos.size())), true).second) return;
    for (Side side : {Side::M, Side::N}) {
      const int limit = side == Side::M ? m_size : n_size;
      for (Element a = 0; a < limit; ++a) {
        std::optional<Element> b = choose(static_cast<const GamePosition&>(pos), side, a);
        if (!b) continue;
        s.set({relation_of(pos), static_cast<int>(pos.size()), side, a}, *b);
        pos.push_back({side, a, *b});
        self(self, pos);
        pos.pop_back();
      }
    }
  };
  GamePosition start;
  walk(walk, start);
  return s;
}

}  // namespace detail

// II answers every move with the same element on the other side.
inline Strategy copy_strategy(int size, int rounds) {
  return detail::tabulate(size, size, rounds, [](const GamePosition&, Side, Element a) { return std::optional<Element>(a); });
}

struct SolveBudget {
  int depth = 4;
  int size = 8;
};

// Exact solver for the n-round game by memoized backward induction over
// (π, rounds remaining). The memo is shared between worker threads.
class EfSolver {
 public:
  EfSolver(const Structure& m, const Structure& n, SolveBudget budget = {}) : m_(m), n_(n) {
    if (!(m.vocabulary() == n.vocabulary())) throw VocabularyError("structures have different vocabularies");
    if (m.size() > budget.size || n.size() > budget.size)
      throw BudgetExceeded("structure size exceeds the size budget of " + std::to_string(budget.size));
    budget_ = budget;
  }

  // Does II win the remaining `k` rounds from π (assumed a partial isomorphism)?
  bool wins(const PartialRelation& pi, int k) {
    if (k == 0) return true;
    const std::string key = encode(pi, k);
    {
      std::shared_lock lock(mu_);
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    bool result = true;
    for (Side side : {Side::M, Side::N}) {
      const int limit = side == Side::M ? m_.size() : n_.size();
      for (Element a = 0; a < limit && result; ++a)
        if (!best_reply(pi, k, side, a)) result = false;
      if (!result) break;
    }
    std::unique_lock lock(mu_);
    memo_.emplace(key, result);
    return result;
  }

  // Least reply keeping II winning with k-1 rounds left after this one.
  std::optional<Element> best_reply(const PartialRelation& pi, int k, Side side, Element a) {
    const int limit = side == Side::M ? n_.size() : m_.size();
    for (Element b = 0; b < limit; ++b) {
      auto next = extend(pi, side == Side::M ? std::make_pair(a, b) : std::make_pair(b, a));
      if (is_partial_isomorphism(m_, n_, next) && wins(next, k - 1)) return b;
    }
    return std::nullopt;
  }

  // Verdict for the full game, using `jobs` threads over I's first moves.
  bool solve(int rounds, int jobs = 1) {
    if (rounds < 0) throw InvalidInput("round count must be non-negative");
    if (rounds > budget_.depth)
      throw BudgetExceeded("round count exceeds the depth budget of " + std::to_string(budget_.depth));
    if (rounds == 0) return true;
    std::vector<std::pair<Side, Element>> first;
    for (Element a = 0; a < m_.size(); ++a) first.emplace_back(Side::M, a);
    for (Element a = 0; a < n_.size(); ++a) first.emplace_back(Side::N, a);
    std::vector<char> ok(first.size(), 0);
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(first.size())));
    auto run = [&](int t) {
      for (std::size_t k = static_cast<std::size_t>(t); k < first.size(); k += static_cast<std::size_t>(workers))
        ok[k] = best_reply({}, rounds, first[k].first, first[k].second).has_value();
    };
    if (workers == 1) {
      run(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < workers; ++t) pool.emplace_back(run, t);
      for (auto& th : pool) th.join();
    }
    return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  }

  // II's winning strategy as a table over every position reachable under it.
  Strategy strategy(int rounds) {
    return detail::tabulate(m_.size(), n_.size(), rounds, [&](const GamePosition& pos, Side side, Element a) {
      return best_reply(relation_of(pos), rounds - static_cast<int>(pos.size()), side, a);
    });
  }

  std::size_t states() const {
    std::shared_lock lock(mu_);
    return memo_.size();
  }

 private:
  static PartialRelation extend(const PartialRelation& pi, std::pair<Element, Element> p) {
    PartialRelation out = pi;
    auto it = std::lower_bound(out.begin(), out.end(), p);
    if (it == out.end() || *it != p) out.insert(it, p);
    return out;
  }

  static std::string encode(const PartialRelation& pi, int k) {
    std::string s;
    s.push_back(static_cast<char>(k));
    for (auto [a, b] : pi) {
      s.push_back(static_cast<char>(a));
      s.push_back(static_cast<char>(b));
    }
    return s;
  }

  const Structure& m_;
  const Structure& n_;
  SolveBudget budget_;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, bool> memo_;
};

// Replays every sequence of I-moves of length `rounds` against the table;
// true iff the table always answers and every resulting π is a partial
// isomorphism.
inline bool certify(const Strategy& s, const Structure& m, const Structure& n, int rounds) {
  if (s.m_size() != m.size() || s.n_size() != n.size() || s.scope() < rounds) return false;
  GamePosition pos;
  auto go = [&](auto&& self) -> bool {
    if (!is_partial_isomorphism(m, n, relation_of(pos))) return false;
    if (static_cast<int>(pos.size()) == rounds) return true;
    for (Side side : {Side::M, Side::N}) {
      const int limit = side == Side::M ? m.size() : n.size();
      for (Element a = 0; a < limit; ++a) {
        auto b = s.reply(pos, side, a);
        if (!b || *b < 0 || *b >= (side == Side::M ? n.size() : m.size())) return false;
        pos.push_back({side, a, *b});
        const bool ok = self(self);
        pos.pop_back();
        if (!ok) return false;
      }
    }
    return true;
  };
  return go(go);
}

enum class Winner { I, II };

struct EfSolution {
  Winner winner = Winner::I;
  std::optional<Strategy> strategy;  // present when II wins
  std::size_t states = 0;
};

inline EfSolution solve_ef(const Structure& m, const Structure& n, int rounds, SolveBudget budget = {}, int jobs = 1) {
  EfSolver solver(m, n, budget);
  EfSolution out;
  out.winner = solver.solve(rounds, jobs) ? Winner::II : Winner::I;
  if (out.winner == Winner::II) {
    out.strategy = solver.strategy(rounds);
    if (!certify(*out.strategy, m, n, rounds)) throw Error("internal: solver strategy failed certification");
  }
  out.states = solver.states();
  return out;
}

}  // namespace modelforge
