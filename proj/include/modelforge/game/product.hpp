#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "modelforge/coherent/family.hpp"
#include "modelforge/errors.hpp"
#include "modelforge/filter/reduced_product.hpp"
#include "modelforge/game/position.hpp"
#include "modelforge/game/solver.hpp"

namespace modelforge {

using ProductRound = BasicRound<ChoiceFunction>;
using ProductPosition = std::vector<ProductRound>;

// The play of coordinate i along the rounds in `along` (ascending).
inline GamePosition coordinate_play(const ProductPosition& pos, int i, const std::vector<int>& along) {
  GamePosition play;
  for (int e : along) {
    const auto& r = pos.at(static_cast<std::size_t>(e));
    play.push_back({r.side, r.move[static_cast<std::size_t>(i)], r.reply[static_cast<std::size_t>(i)]});
  }
  return play;
}

// Is `play` a play according to σ: every reply is the table's reply.
inline bool follows(const Strategy& sigma, const GamePosition& play) {
  GamePosition prefix;
  for (const auto& r : play) {
    auto b = sigma.reply(prefix, r.side, r.move);
    if (!b || *b != r.reply) return false;
    prefix.push_back(r);
  }
  return true;
}

struct GoodnessVerdict {
  bool good = true;
  int zeta = -1;
  int index = -1;
};

// For every ζ < ξ and every i, the coordinate play along u[ζ][i] ∪ {ζ}
// follows σ_i. ξ is the number of rounds in the position.
inline GoodnessVerdict is_good_position(const ProductPosition& pos, const CoherentFamily& f, const std::vector<Strategy>& sigma) {
  if (static_cast<int>(sigma.size()) != f.index_size()) throw InvalidInput("one strategy per index is required");
  if (static_cast<int>(pos.size()) > f.element_count()) return {false, f.element_count(), -1};
  for (int z = 0; z < static_cast<int>(pos.size()); ++z)
    for (int i = 0; i < f.index_size(); ++i) {
      auto along = f.u(z, i);
      along.push_back(z);
      if (!follows(sigma[static_cast<std::size_t>(i)], coordinate_play(pos, i, along))) return {false, z, i};
    }
  return {};
}

// II's strategy on (∏M_i/D, ∏N_i/D) built coordinatewise from the σ_i.
class ComposedStrategy {
 public:
  ComposedStrategy(std::vector<Structure> m, std::vector<Structure> n, CoherentFamily f, std::vector<Strategy> sigma)
      : m_(std::move(m)), n_(std::move(n)), f_(std::move(f)), sigma_(std::move(sigma)) {}

  const CoherentFamily& family() const noexcept { return f_; }
  const std::vector<Strategy>& strategies() const noexcept { return sigma_; }
  // Rounds are indexed by elements of the family.
  int length_bound() const noexcept { return f_.element_count(); }

  ChoiceFunction reply(const ProductPosition& pos, Side side, const ChoiceFunction& move) const {
    const int xi = static_cast<int>(pos.size());
    if (xi >= f_.element_count())
      throw PreconditionFailure("round " + std::to_string(xi) + " is beyond the family's " +
                                std::to_string(f_.element_count()) + " elements");
    if (static_cast<int>(move.size()) != f_.index_size()) throw InvalidInput("move has the wrong number of coordinates");
    const auto& from = side == Side::M ? m_ : n_;
    for (std::size_t i = 0; i < move.size(); ++i)
      if (move[i] < 0 || move[i] >= from[i].size()) throw InvalidInput("move leaves factor " + std::to_string(i));
    auto g = is_good_position(pos, f_, sigma_);
    if (!g.good)
      throw PreconditionFailure("position is not good at round " + std::to_string(g.zeta) + ", index " + std::to_string(g.index));
    ChoiceFunction out(move.size());
    for (int i = 0; i < f_.index_size(); ++i) {
      const auto play = coordinate_play(pos, i, f_.u(xi, i));
      auto b = sigma_[static_cast<std::size_t>(i)].reply(play, side, move[static_cast<std::size_t>(i)]);
      if (!b) throw PreconditionFailure("strategy " + std::to_string(i) + " has no reply at this position");
      out[static_cast<std::size_t>(i)] = *b;
    }
    return out;
  }

 private:
  std::vector<Structure> m_, n_;
  CoherentFamily f_;
  std::vector<Strategy> sigma_;
};

// Checks the hypotheses (σ_i certified for n[i] rounds on (M_i, N_i); F
// coherent for D at bound b) and returns the composed strategy.
inline ComposedStrategy compose_strategy(const std::vector<Structure>& m, const std::vector<Structure>& n,
                                         const FilterOnIndex& d, const CoherentFamily& f,
                                         const std::vector<Strategy>& sigma, int b_bound = 2) {
  const auto k = static_cast<std::size_t>(d.index_size());
  if (m.size() != k || n.size() != k || sigma.size() != k || static_cast<std::size_t>(f.index_size()) != k)
    throw InvalidInput("factors, strategies, family and filter must share the index set");
  for (std::size_t i = 0; i < k; ++i)
    if (!certify(sigma[i], m[i], n[i], f.cap(static_cast<int>(i))))
      throw PreconditionFailure("strategy " + std::to_string(i) + " is not certified for " +
                                std::to_string(f.cap(static_cast<int>(i))) + " rounds");
  auto rep = check_coherent(f, d, b_bound);
  if (!rep.ok()) throw PreconditionFailure("family is not coherent for the filter");
  return ComposedStrategy(m, n, f, sigma);
}

// π on classes of the reduced products.
inline PartialRelation class_relation(const ReducedProduct& pm, const ReducedProduct& pn, const ProductPosition& pos) {
  PartialRelation pi;
  for (const auto& r : pos) pi.emplace_back(pm.class_of(r.in_m()), pn.class_of(r.in_n()));
  std::sort(pi.begin(), pi.end());
  pi.erase(std::unique(pi.begin(), pi.end()), pi.end());
  return pi;
}

template <typename E>
struct AdversaryResult {
  bool ok = true;
  bool complete = true;
  std::size_t explored = 0;
  std::size_t total = 0;
  std::vector<BasicRound<E>> counterexample;
  std::string failure;
  double explored_fraction() const noexcept { return total ? static_cast<double>(explored) / static_cast<double>(total) : 1.0; }
};

// Depth-first search over every sequence of I-moves of the given length.
// `reply(pos, side, move)` is II's answer; `judge(pos)` returns a failure
// message or nullopt and is called after every reply. Work is split over I's
// first moves; the reported counterexample is the one with the least first
// move, so the result does not depend on `jobs`.
template <typename E, typename Reply, typename Judge>
AdversaryResult<E> adversary_search(const std::vector<E>& m_moves, const std::vector<E>& n_moves, int length,
                                    std::size_t budget, Reply&& reply, Judge&& judge, int jobs = 1) {
  AdversaryResult<E> res;
  const std::size_t branch = m_moves.size() + n_moves.size();
  std::size_t layer = 1;
  for (int r = 0; r < length; ++r) {
    layer *= branch;
    res.total += layer;
  }
  if (length == 0 || branch == 0) return res;

  struct Part {
    AdversaryResult<E> r;
  };
  std::vector<Part> parts(branch);
  std::atomic<std::size_t> spent{0};
  auto move_at = [&](std::size_t k) -> std::pair<Side, const E*> {
    return k < m_moves.size() ? std::make_pair(Side::M, &m_moves[k]) : std::make_pair(Side::N, &n_moves[k - m_moves.size()]);
  };
  auto explore_first = [&](std::size_t first) {
    auto& out = parts[first].r;
    std::vector<BasicRound<E>> pos;
    auto go = [&](auto&& self, std::size_t k) -> bool {
      if (spent.fetch_add(1) >= budget) {
        out.complete = false;
        return false;
      }
      ++out.explored;
      auto [side, mv] = move_at(k);
      try {
        E b = reply(static_cast<const std::vector<BasicRound<E>>&>(pos), side, *mv);
        pos.push_back({side, *mv, std::move(b)});
      } catch (const Error& e) {
        out.ok = false;
        out.counterexample = pos;
        out.counterexample.push_back({side, *mv, E{}});
        out.failure = std::string("strategy failed to answer: ") + e.what();
        return false;
      }
      if (auto why = judge(static_cast<const std::vector<BasicRound<E>>&>(pos))) {
        out.ok = false;
        out.counterexample = pos;
        out.failure = *why;
        pos.pop_back();
        return false;
      }
      if (static_cast<int>(pos.size()) < length)
        for (std::size_t next = 0; next < branch; ++next)
          if (!self(self, next)) {
            pos.pop_back();
            return false;
          }
      pos.pop_back();
      return true;
    };
    go(go, first);
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(branch)));
  if (workers == 1) {
    for (std::size_t k = 0; k < branch; ++k) {
      explore_first(k);
      if (!parts[k].r.ok || !parts[k].r.complete) break;
    }
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t k = static_cast<std::size_t>(t); k < branch; k += static_cast<std::size_t>(workers)) explore_first(k);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& p : parts) {
    res.explored += p.r.explored;
    if (!p.r.complete) res.complete = false;
    if (!p.r.ok && res.ok) {
      res.ok = false;
      res.counterexample = p.r.counterexample;
      res.failure = p.r.failure;
    }
  }
  if (!res.complete && res.ok) res.ok = false;
  return res;
}

// Plain game: I ranges over all elements of M and N.
template <typename Reply>
AdversaryResult<Element> exhaustive_adversary_check(const Structure& m, const Structure& n, Reply&& reply, int length,
                                                    std::size_t budget, int jobs = 1) {
  std::vector<Element> mm, nn;
  for (Element a = 0; a < m.size(); ++a) mm.push_back(a);
  for (Element a = 0; a < n.size(); ++a) nn.push_back(a);
  return adversary_search<Element>(
      mm, nn, length, budget, reply,
      [&](const GamePosition& pos) -> std::optional<std::string> {
        for (const auto& r : pos) {
          const int limit = r.side == Side::M ? n.size() : m.size();
          if (r.reply < 0 || r.reply >= limit) return "reply outside the universe";
        }
        if (!is_partial_isomorphism(m, n, relation_of(pos))) return "π is not a partial isomorphism";
        return std::nullopt;
      },
      jobs);
}

struct ProductAdversaryOptions {
  // I moves over canonical class representatives instead of all choice functions.
  bool representatives = true;
  // Extra per-node assertion, e.g. goodness of the position.
  std::function<std::optional<std::string>(const ProductPosition&)> hook;
  int jobs = 1;
};

// Product game against a composed strategy; every node is checked for a
// class-level partial isomorphism and then passed to the hook.
inline AdversaryResult<ChoiceFunction> exhaustive_adversary_check(const ComposedStrategy& sigma, const ReducedProduct& pm,
                                                                  const ReducedProduct& pn, int length, std::size_t budget,
                                                                  const ProductAdversaryOptions& opt = {}) {
  std::vector<ChoiceFunction> mm, nn;
  if (opt.representatives) {
    mm = pm.representatives();
    nn = pn.representatives();
  } else {
    pm.for_each_function([&](const ChoiceFunction& f) { mm.push_back(f); });
    pn.for_each_function([&](const ChoiceFunction& f) { nn.push_back(f); });
  }
  return adversary_search<ChoiceFunction>(
      mm, nn, length, budget,
      [&](const ProductPosition& pos, Side side, const ChoiceFunction& mv) { return sigma.reply(pos, side, mv); },
      [&](const ProductPosition& pos) -> std::optional<std::string> {
        if (!is_partial_isomorphism(pm.quotient(), pn.quotient(), class_relation(pm, pn, pos)))
          return "class relation is not a partial isomorphism";
        if (opt.hook) return opt.hook(pos);
        return std::nullopt;
      },
      opt.jobs);
}

}  // namespace modelforge
