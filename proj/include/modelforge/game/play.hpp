#pragma once

#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "modelforge/errors.hpp"
#include "modelforge/game/position.hpp"
#include "modelforge/game/product.hpp"
#include "modelforge/game/solver.hpp"

namespace modelforge {

struct ReplayVerdict {
  bool legal = true;       // every element inside its universe
  bool consistent = true;  // replies agree with the strategy, when one is given
  bool ii_wins = true;     // π is a partial isomorphism after every round
  int failed_round = -1;   // first round at which any of the above broke
  std::string reason;
  friend bool operator==(const ReplayVerdict&, const ReplayVerdict&) = default;
};

inline ReplayVerdict replay_transcript(const Structure& m, const Structure& n, const GamePosition& rounds,
                                       const Strategy* sigma = nullptr) {
  ReplayVerdict v;
  GamePosition pos;
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const auto& r = rounds[k];
    const int move_limit = r.side == Side::M ? m.size() : n.size();
    const int reply_limit = r.side == Side::M ? n.size() : m.size();
    auto fail = [&](std::string why) {
      v.failed_round = static_cast<int>(k);
      v.reason = std::move(why);
    };
    if (r.move < 0 || r.move >= move_limit || r.reply < 0 || r.reply >= reply_limit) {
      v.legal = v.ii_wins = false;
      fail("element outside its universe");
      return v;
    }
    if (sigma) {
      auto b = sigma->reply(pos, r.side, r.move);
      if (!b || *b != r.reply) {
        v.consistent = false;
        fail("reply differs from the strategy");
        return v;
      }
    }
    pos.push_back(r);
    if (!is_partial_isomorphism(m, n, relation_of(pos))) {
      v.ii_wins = false;
      fail("π is not a partial isomorphism");
      return v;
    }
  }
  return v;
}

// Product-game replay against a composed strategy; π is taken on classes.
inline ReplayVerdict replay_transcript(const ReducedProduct& pm, const ReducedProduct& pn, const ProductPosition& rounds,
                                       const ComposedStrategy* sigma = nullptr) {
  ReplayVerdict v;
  ProductPosition pos;
  for (std::size_t k = 0; k < rounds.size(); ++k) {
    const auto& r = rounds[k];
    try {
      pm.check_function(r.in_m());
      pn.check_function(r.in_n());
    } catch (const InvalidInput& e) {
      v.legal = v.ii_wins = false;
      v.failed_round = static_cast<int>(k);
      v.reason = e.what();
      return v;
    }
    if (sigma) {
      std::optional<ChoiceFunction> b;
      try {
        b = sigma->reply(pos, r.side, r.move);
      } catch (const Error&) {
      }
      if (!b || *b != r.reply) {
        v.consistent = false;
        v.failed_round = static_cast<int>(k);
        v.reason = "reply differs from the strategy";
        return v;
      }
    }
    pos.push_back(r);
    if (!is_partial_isomorphism(pm.quotient(), pn.quotient(), class_relation(pm, pn, pos))) {
      v.ii_wins = false;
      v.failed_round = static_cast<int>(k);
      v.reason = "class relation is not a partial isomorphism";
      return v;
    }
  }
  return v;
}

// Terminal driver: the human is player I and types "<side> <element>" each
// round (an element of a product game is a comma-separated choice function).
// Illegal input re-prompts. Stops early at end of input.
template <typename E>
struct InteractiveSession {
  std::function<std::optional<E>(Side, const std::string&)> parse;  // nullopt when illegal
  std::function<E(const std::vector<BasicRound<E>>&, Side, const E&)> reply;
  std::function<bool(const std::vector<BasicRound<E>>&)> won;  // II still winning?
  std::function<std::string(const E&)> show;
};

template <typename E>
std::vector<BasicRound<E>> play_interactive(std::istream& in, std::ostream& out, const InteractiveSession<E>& s, int rounds) {
  std::vector<BasicRound<E>> pos;
  while (static_cast<int>(pos.size()) < rounds) {
    out << "round " << pos.size() << "> " << std::flush;
    std::string line;
    if (!std::getline(in, line)) break;
    std::istringstream ls(line);
    std::string side_text, elem_text;
    ls >> side_text >> elem_text;
    std::optional<Side> side;
    if (side_text == "M" || side_text == "N") side = parse_side(side_text);
    std::optional<E> move;
    if (side) move = s.parse(*side, elem_text);
    if (!move) {
      out << "illegal move; enter \"M <element>\" or \"N <element>\"\n";
      continue;
    }
    E b = s.reply(pos, *side, *move);
    pos.push_back({*side, *move, b});
    out << "II answers " << s.show(b) << " in " << side_name(other(*side)) << "\n";
    if (!s.won(pos)) {
      out << "I wins: π is not a partial isomorphism\n";
      return pos;
    }
  }
  out << (static_cast<int>(pos.size()) == rounds ? "II wins\n" : "game abandoned\n");
  return pos;
}

inline InteractiveSession<Element> plain_session(const Structure& m, const Structure& n, const Strategy& sigma) {
  InteractiveSession<Element> s;
  s.parse = [&m, &n](Side side, const std::string& t) -> std::optional<Element> {
    try {
      std::size_t used = 0;
      const int a = std::stoi(t, &used);
      const int limit = side == Side::M ? m.size() : n.size();
      if (used != t.size() || a < 0 || a >= limit) return std::nullopt;
      return a;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
  s.reply = [&sigma](const GamePosition& pos, Side side, const Element& a) {
    auto b = sigma.reply(pos, side, a);
    if (!b) throw PreconditionFailure("strategy has no reply at this position");
    return *b;
  };
  s.won = [&m, &n](const GamePosition& pos) { return is_partial_isomorphism(m, n, relation_of(pos)); };
  s.show = [](const Element& a) { return std::to_string(a); };
  return s;
}

inline InteractiveSession<ChoiceFunction> product_session(const ReducedProduct& pm, const ReducedProduct& pn,
                                                          const ComposedStrategy& sigma) {
  InteractiveSession<ChoiceFunction> s;
  s.parse = [&pm, &pn](Side side, const std::string& t) -> std::optional<ChoiceFunction> {
    ChoiceFunction f;
    std::istringstream ss(t);
    std::string part;
    try {
      while (std::getline(ss, part, ',')) f.push_back(std::stoi(part));
      (side == Side::M ? pm : pn).check_function(f);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    return f;
  };
  s.reply = [&sigma](const ProductPosition& pos, Side side, const ChoiceFunction& f) { return sigma.reply(pos, side, f); };
  s.won = [&pm, &pn](const ProductPosition& pos) {
    return is_partial_isomorphism(pm.quotient(), pn.quotient(), class_relation(pm, pn, pos));
  };
  s.show = [](const ChoiceFunction& f) {
    std::string out;
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + std::to_string(f[i]);
    return out;
  };
  return s;
}

}  // namespace modelforge
