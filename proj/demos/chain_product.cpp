// Two copies of the 7-chain against two copies of the 8-chain: II wins EF_3
// in every coordinate, and the composed strategy carries that to a 2-round
// game on the reduced products. Prints one played line of the product game.
#include <iostream>

#include "modelforge/modelforge.hpp"

using namespace modelforge;

int main() {
  std::vector<Structure> m{make_chain(7), make_chain(7)}, n{make_chain(8), make_chain(8)};
  auto d = FilterOnIndex::principal(2, 0);
  CoherentFamily f(2, 2, {3, 3}, {{{}, {}}, {{0}, {}}});
  std::vector<Strategy> sigma;
  for (std::size_t i = 0; i < 2; ++i) sigma.push_back(*solve_ef(m[i], n[i], 3).strategy);

  auto composed = compose_strategy(m, n, d, f, sigma);
  auto pm = reduced_product(m, d), pn = reduced_product(n, d);
  std::cout << "classes: " << pm.representatives().size() << " in M^I/D, " << pn.representatives().size() << " in N^I/D\n";

  ProductPosition pos;
  for (auto [side, move] : {std::pair{Side::M, ChoiceFunction{3, 6}}, std::pair{Side::N, ChoiceFunction{7, 0}}}) {
    auto reply = composed.reply(pos, side, move);
    pos.push_back({side, move, reply});
    std::cout << "I plays " << side_name(side) << " (" << move[0] << "," << move[1] << "), II answers (" << reply[0] << ","
              << reply[1] << ")\n";
  }
  std::cout << "good position: " << (is_good_position(pos, f, sigma).good ? "yes" : "no") << "\n";

  auto r = exhaustive_adversary_check(composed, pm, pn, 2, 10'000'000);
  std::cout << "adversary: " << r.explored << " positions, " << (r.ok ? "II never loses" : r.failure) << "\n";
  return r.ok ? 0 : 1;
}
