#include <gtest/gtest.h>

#include <sstream>

#include "modelforge/game/play.hpp"
#include "modelforge/game/product.hpp"
#include "modelforge/game/solver.hpp"
#include "modelforge/gen/instances.hpp"
#include "modelforge/io/serialize.hpp"
#include "modelforge/logic/enumerate.hpp"
#include "modelforge/logic/evaluate.hpp"
#include "support.hpp"

using namespace modelforge;

namespace {

// Partial isomorphism by unfolding the definition over the binary symbol R.
bool naive_partial_iso(const Structure& m, const Structure& n, const PartialRelation& pi) {
  for (auto [a, b] : pi)
    for (auto [c, d] : pi) {
      if ((a == c) != (b == d)) return false;
      if (m.holds(0, std::vector<Element>{a, c}) != n.holds(0, std::vector<Element>{b, d})) return false;
    }
  return true;
}

bool isomorphic(const Structure& a, const Structure& b) {
  if (a.size() != b.size()) return false;
  std::vector<int> p(static_cast<std::size_t>(a.size()));
  std::iota(p.begin(), p.end(), 0);
  do {
    bool ok = true;
    for (int x = 0; x < a.size() && ok; ++x)
      for (int y = 0; y < a.size() && ok; ++y)
        ok = a.holds(0, std::vector<Element>{x, y}) ==
             b.holds(0, std::vector<Element>{p[static_cast<std::size_t>(x)], p[static_cast<std::size_t>(y)]});
    if (ok) return true;
  } while (std::next_permutation(p.begin(), p.end()));
  return false;
}

std::vector<bool> verdicts(const Structure& m, const std::vector<Formula>& sentences) {
  std::vector<bool> out;
  for (const auto& s : sentences) out.push_back(evaluate(m, s));
  return out;
}

TEST(PartialIso, Examples) {
  auto c2 = make_chain(2), c3 = make_chain(3);
  EXPECT_TRUE(is_partial_isomorphism(c2, c3, {}));
  EXPECT_FALSE(is_partial_isomorphism(c2, c3, {{0, 2}, {1, 0}}));
  EXPECT_TRUE(is_partial_isomorphism(c2, c3, {{0, 0}, {1, 2}}));
  EXPECT_FALSE(is_partial_isomorphism(c2, c3, {{0, 0}, {0, 1}}));
  EXPECT_THROW(is_partial_isomorphism(c2, c3, {{5, 0}}), InvalidInput);
}

TEST(PartialIso, AgreesWithUnfoldedDefinition) {
  auto all = mftest::all_binary_structures(3);
  gen::Rng rng(17);
  for (int trial = 0; trial < 4000; ++trial) {
    const auto& m = all[static_cast<std::size_t>(gen::uniform(rng, 0, static_cast<int>(all.size()) - 1))];
    const auto& n = all[static_cast<std::size_t>(gen::uniform(rng, 0, static_cast<int>(all.size()) - 1))];
    PartialRelation pi;
    const int k = gen::uniform(rng, 0, 3);
    for (int j = 0; j < k; ++j) pi.emplace_back(gen::uniform(rng, 0, m.size() - 1), gen::uniform(rng, 0, n.size() - 1));
    std::sort(pi.begin(), pi.end());
    pi.erase(std::unique(pi.begin(), pi.end()), pi.end());
    ASSERT_EQ(is_partial_isomorphism(m, n, pi), naive_partial_iso(m, n, pi));
  }
}

TEST(SolveEf, IdenticalStructuresAndCopyStrategy) {
  gen::Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = gen::random_structure(rng, gen::binary_vocabulary(), gen::uniform(rng, 1, 4));
    for (int n = 1; n <= 3; ++n) {
      auto sol = solve_ef(m, m, n);
      ASSERT_EQ(sol.winner, Winner::II);
      ASSERT_TRUE(certify(copy_strategy(m.size(), n), m, m, n));
    }
  }
}

TEST(SolveEf, ShortChains) {
  EXPECT_EQ(solve_ef(make_chain(2), make_chain(3), 2).winner, Winner::I);
  EXPECT_EQ(solve_ef(make_chain(2), make_chain(3), 1).winner, Winner::II);
  EXPECT_FALSE(solve_ef(make_chain(2), make_chain(3), 2).strategy.has_value());
}

TEST(SolveEf, Budgets) {
  EXPECT_THROW(solve_ef(make_chain(3), make_chain(3), 5), BudgetExceeded);
  EXPECT_THROW(solve_ef(make_chain(9), make_chain(3), 1), BudgetExceeded);
  EXPECT_NO_THROW(solve_ef(make_chain(9), make_chain(3), 5, {5, 9}));
}

TEST(SolveEf, LinearOrderLaw) {
  for (int a = 1; a <= 8; ++a)
    for (int b = 1; b <= 8; ++b)
      for (int n = 1; n <= 3; ++n) {
        const bool expect = a == b || std::min(a, b) >= (1 << n) - 1;
        ASSERT_EQ(solve_ef(make_chain(a), make_chain(b), n).winner == Winner::II, expect) << a << " " << b << " " << n;
      }
}

// Sampled here; the acceptance run covers every pair.
TEST(SolveEf, MatchesSentenceAgreement) {
  auto reps = mftest::binary_structures_up_to_iso(3);
  for (int n = 1; n <= 2; ++n) {
    auto sentences = enumerate_sentences(gen::binary_vocabulary(), n, 1'000'000);
    ASSERT_TRUE(sentences.complete);
    std::vector<std::vector<bool>> v;
    for (const auto& m : reps) v.push_back(verdicts(m, sentences.sentences));
    for (std::size_t x = 0; x < reps.size(); x += 3)
      for (std::size_t y = 0; y < reps.size(); y += 2)
        ASSERT_EQ(solve_ef(reps[x], reps[y], n).winner == Winner::II, v[x] == v[y]) << x << " " << y << " " << n;
  }
}

TEST(SolveEf, WinningStrategiesCertify) {
  gen::Rng rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    auto m = gen::random_structure(rng, gen::binary_vocabulary(), gen::uniform(rng, 1, 4));
    auto n = trial % 2 ? gen::permuted_copy(rng, m) : gen::random_structure(rng, gen::binary_vocabulary(), gen::uniform(rng, 1, 4));
    const int rounds = gen::uniform(rng, 1, 3);
    auto sol = solve_ef(m, n, rounds);
    if (sol.winner == Winner::II) {
      ASSERT_TRUE(certify(*sol.strategy, m, n, rounds));
      auto adv = exhaustive_adversary_check(
          m, n, [&](const GamePosition& p, Side s, Element a) { return *sol.strategy->reply(p, s, a); }, rounds, 1'000'000);
      ASSERT_TRUE(adv.ok && adv.complete);
    }
  }
}

TEST(SolveEf, JobsGiveTheSameStrategy) {
  gen::Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    auto m = gen::random_structure(rng, gen::binary_vocabulary(), 4);
    auto n = gen::permuted_copy(rng, m);
    EfSolver a(m, n), b(m, n);
    ASSERT_EQ(a.solve(3, 1), b.solve(3, 3));
    ASSERT_EQ(a.strategy(3), b.strategy(3));
  }
}

// For equal sizes k, EF_k already forces a bijection; unequal sizes are told apart in min+1 rounds.
TEST(SolveEf, LongGameWinImpliesIsomorphism) {
  gen::Rng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int za = gen::uniform(rng, 1, 4);
    auto a = gen::random_structure(rng, gen::binary_vocabulary(), za);
    auto b = trial % 3 == 0 ? gen::permuted_copy(rng, a) : gen::random_structure(rng, gen::binary_vocabulary(), gen::uniform(rng, 1, 4));
    const int rounds = std::max(a.size(), b.size()) + (a.size() != b.size() ? 1 : 0);
    const bool ii = solve_ef(a, b, rounds, {5, 8}).winner == Winner::II;
    ASSERT_EQ(ii, isomorphic(a, b)) << trial;
  }
}

TEST(Certify, RejectsLosingTables) {
  auto c3 = make_chain(3);
  Strategy zero = detail::tabulate(3, 3, 2, [](const GamePosition&, Side, Element) { return std::optional<Element>(0); });
  EXPECT_FALSE(certify(zero, c3, c3, 2));
  EXPECT_FALSE(certify(copy_strategy(3, 1), c3, c3, 2));
}

TEST(Adversary, CopyStrategyAndNegativeControl) {
  auto m = gen::random_structure(*std::make_unique<gen::Rng>(2), gen::binary_vocabulary(), 3);
  auto copy = [](const GamePosition&, Side, Element a) { return a; };
  auto ok = exhaustive_adversary_check(m, m, copy, 3, 1'000'000);
  EXPECT_TRUE(ok.ok);
  EXPECT_TRUE(ok.complete);
  EXPECT_EQ(ok.explored, ok.total);

  auto c3 = make_chain(3);
  auto zero = [](const GamePosition&, Side, Element) { return 0; };
  auto bad = exhaustive_adversary_check(c3, c3, zero, 2, 1'000'000);
  ASSERT_FALSE(bad.ok);
  ASSERT_FALSE(bad.counterexample.empty());
  for (const auto& r : bad.counterexample) EXPECT_EQ(r.reply, 0);
  EXPECT_FALSE(replay_transcript(c3, c3, bad.counterexample).ii_wins);
}

TEST(Adversary, BudgetReportsExploredFraction) {
  auto c4 = make_chain(4);
  auto copy = [](const GamePosition&, Side, Element a) { return a; };
  auto r = exhaustive_adversary_check(c4, c4, copy, 3, 50);
  EXPECT_FALSE(r.complete);
  EXPECT_LT(r.explored_fraction(), 1.0);
  EXPECT_GT(r.explored, 0U);
}

TEST(Adversary, JobsGiveTheSameCounterexample) {
  auto c3 = make_chain(3), c4 = make_chain(4);
  auto sol = solve_ef(c3, c4, 1).strategy;
  auto reply = [&](const GamePosition& p, Side s, Element a) -> Element {
    auto b = sol->reply(p, s, a);
    if (!b) throw PreconditionFailure("no reply");
    return *b;
  };
  auto a = exhaustive_adversary_check(c3, c4, reply, 2, 1'000'000, 1);
  auto b = exhaustive_adversary_check(c3, c4, reply, 2, 1'000'000, 4);
  EXPECT_FALSE(a.ok);
  EXPECT_EQ(a.counterexample, b.counterexample);
  EXPECT_EQ(a.failure, b.failure);
}

struct ProductCase {
  std::vector<Structure> m, n;
  FilterOnIndex d = FilterOnIndex::trivial(1);
  CoherentFamily f;
  std::vector<Strategy> sigma;
};

ProductCase chains_case() {
  ProductCase c;
  c.m = {make_chain(7), make_chain(7)};
  c.n = {make_chain(8), make_chain(8)};
  c.d = FilterOnIndex::trivial(2);
  c.f = CoherentFamily(2, 2, {3, 3}, {{{}, {}}, {{0}, {0}}});
  for (int i = 0; i < 2; ++i) c.sigma.push_back(*solve_ef(c.m[static_cast<std::size_t>(i)], c.n[static_cast<std::size_t>(i)], 3).strategy);
  return c;
}

TEST(ComposeStrategy, IdenticalFactorsGiveCoordinatewiseCopy) {
  std::vector<Structure> m{make_chain(3), gen::random_structure(*std::make_unique<gen::Rng>(1), gen::binary_vocabulary(), 3)};
  auto d = FilterOnIndex::principal(2, 0);
  CoherentFamily f(2, 2, {2, 2}, {{{}, {}}, {{0}, {}}});
  std::vector<Strategy> sigma{copy_strategy(3, 2), copy_strategy(3, 2)};
  auto s = compose_strategy(m, m, d, f, sigma);
  auto pm = reduced_product(m, d), pn = reduced_product(m, d);
  ProductPosition pos;
  ChoiceFunction f0{2, 1};
  auto g0 = s.reply(pos, Side::M, f0);
  EXPECT_EQ(g0, f0);
  pos.push_back({Side::M, f0, g0});
  ChoiceFunction f1{0, 2};
  EXPECT_EQ(s.reply(pos, Side::N, f1), f1);
  auto r = exhaustive_adversary_check(s, pm, pn, 2, 1'000'000);
  EXPECT_TRUE(r.ok && r.complete);
}

TEST(ComposeStrategy, ChainsSurviveTwoRounds) {
  auto c = chains_case();
  auto s = compose_strategy(c.m, c.n, c.d, c.f, c.sigma);
  auto pm = reduced_product(c.m, c.d), pn = reduced_product(c.n, c.d);
  ProductAdversaryOptions opt;
  std::size_t checked = 0;
  opt.hook = [&](const ProductPosition& pos) -> std::optional<std::string> {
    ++checked;
    if (!is_good_position(pos, c.f, c.sigma).good) return "position is not good";
    return std::nullopt;
  };
  auto r = exhaustive_adversary_check(s, pm, pn, 2, 10'000'000, opt);
  EXPECT_TRUE(r.ok) << r.failure;
  EXPECT_TRUE(r.complete);
  EXPECT_EQ(checked, r.explored);
}

TEST(ComposeStrategy, SideSwitchingRepliesOnTheOtherSide) {
  auto c = chains_case();
  auto s = compose_strategy(c.m, c.n, c.d, c.f, c.sigma);
  ProductPosition pos;
  ChoiceFunction fm{3, 5};
  auto g = s.reply(pos, Side::M, fm);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_LT(g[i], 8);
  pos.push_back({Side::M, fm, g});
  ChoiceFunction fn{7, 0};
  auto h = s.reply(pos, Side::N, fn);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_LT(h[i], 7);
  pos.push_back({Side::N, fn, h});
  EXPECT_TRUE(is_good_position(pos, c.f, c.sigma).good);
  EXPECT_THROW(s.reply(pos, Side::M, fm), PreconditionFailure);
}

TEST(ComposeStrategy, Preconditions) {
  auto c = chains_case();
  auto weak = c.sigma;
  weak[0] = *solve_ef(c.m[0], c.n[0], 2).strategy;
  EXPECT_THROW(compose_strategy(c.m, c.n, c.d, c.f, weak), PreconditionFailure);
  CoherentFamily incoherent(2, 2, {3, 3}, {{{}, {}}, {{}, {}}});
  EXPECT_THROW(compose_strategy(c.m, c.n, c.d, incoherent, c.sigma), PreconditionFailure);
  EXPECT_THROW(compose_strategy(c.m, c.n, FilterOnIndex::trivial(3), c.f, c.sigma), InvalidInput);
}

TEST(GoodPosition, EmptyAndDeviating) {
  auto c = chains_case();
  EXPECT_TRUE(is_good_position({}, c.f, c.sigma).good);
  auto s = compose_strategy(c.m, c.n, c.d, c.f, c.sigma);
  ChoiceFunction f0{3, 3};
  auto g0 = s.reply({}, Side::M, f0);
  g0[1] = (g0[1] + 1) % 8;
  auto v = is_good_position({{Side::M, f0, g0}}, c.f, c.sigma);
  EXPECT_FALSE(v.good);
  EXPECT_EQ(v.zeta, 0);
  EXPECT_EQ(v.index, 1);
  EXPECT_THROW(s.reply({{Side::M, f0, g0}}, Side::M, f0), PreconditionFailure);
}

TEST(Play, HumanAgainstCopyStrategy) {
  auto m = make_chain(4);
  auto sigma = copy_strategy(4, 3);
  std::istringstream in("M 2\nX 1\nN 9\nN 0\nM 3\n");
  std::ostringstream out;
  auto rounds = play_interactive(in, out, plain_session(m, m, sigma), 3);
  ASSERT_EQ(rounds.size(), 3U);
  EXPECT_EQ(rounds[1].side, Side::N);
  EXPECT_EQ(rounds[1].reply, 0);
  EXPECT_NE(out.str().find("illegal move"), std::string::npos);
  EXPECT_NE(out.str().find("II wins"), std::string::npos);
  auto text = io::transcript_to_string(rounds);
  auto back = io::transcript_from_string<Element>(text);
  EXPECT_EQ(back, rounds);
  auto v1 = replay_transcript(m, m, back, &sigma);
  auto v2 = replay_transcript(m, m, io::transcript_from_string<Element>(text), &sigma);
  EXPECT_TRUE(v1.ii_wins && v1.consistent && v1.legal);
  EXPECT_EQ(v1, v2);
}

TEST(Play, ProductSession) {
  auto c = chains_case();
  auto s = compose_strategy(c.m, c.n, c.d, c.f, c.sigma);
  auto pm = reduced_product(c.m, c.d), pn = reduced_product(c.n, c.d);
  std::istringstream in("M 1,2\nN 9,9\nN 0,7\n");
  std::ostringstream out;
  auto rounds = play_interactive(in, out, product_session(pm, pn, s), 2);
  ASSERT_EQ(rounds.size(), 2U);
  auto back = io::transcript_from_string<ChoiceFunction>(io::transcript_to_string(rounds));
  EXPECT_EQ(back, rounds);
  auto v = replay_transcript(pm, pn, back, &s);
  EXPECT_TRUE(v.ii_wins && v.consistent);
}

TEST(Transcript, MalformedLinesAreInputErrors) {
  EXPECT_THROW(io::transcript_from_string<Element>("{\"round\":1,\"I\":{\"side\":\"M\",\"elem\":0},\"II\":{\"side\":\"N\",\"elem\":0}}\n"),
               InvalidInput);
  EXPECT_THROW(io::transcript_from_string<Element>("{\"round\":0,\"I\":{\"side\":\"M\",\"elem\":0},\"II\":{\"side\":\"M\",\"elem\":0}}\n"),
               InvalidInput);
  EXPECT_THROW(io::transcript_from_string<Element>("not json\n"), InvalidInput);
}

TEST(StrategyFile, RoundTrip) {
  auto sol = solve_ef(make_chain(4), make_chain(5), 2);
  ASSERT_TRUE(sol.strategy);
  auto j = io::strategy_to_json(*sol.strategy);
  EXPECT_EQ(j["format"], "modelforge-strategy");
  EXPECT_EQ(io::strategy_from_json(io::parse_json(j.dump())), *sol.strategy);
  EXPECT_THROW(io::strategy_from_json(io::parse_json("{\"format\":\"x\"}")), InvalidInput);
}

}  // namespace
