#include <gtest/gtest.h>

#include <set>

#include "modelforge/filter/reduced_product.hpp"
#include "modelforge/logic/enumerate.hpp"
#include "modelforge/logic/syntax.hpp"
#include "support.hpp"

using namespace modelforge;

namespace {

IndexSet from_mask(int n, unsigned mask) {
  IndexSet s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    if (mask >> i & 1U) s.set(static_cast<std::size_t>(i));
  return s;
}

// Closure of the generators under supersets and finite intersections,
// computed by saturation over all subsets (as bit masks).
std::set<unsigned> saturate(int n, const std::vector<unsigned>& gens) {
  std::set<unsigned> fam(gens.begin(), gens.end());
  if (fam.empty()) fam.insert((1U << n) - 1);
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<unsigned> cur(fam.begin(), fam.end());
    for (unsigned a : cur) {
      for (unsigned b : cur) changed |= fam.insert(a & b).second;
      for (unsigned x = 0; x < (1U << n); ++x)
        if ((x & a) == a) changed |= fam.insert(x).second;
    }
  }
  return fam;
}

TEST(Filter, Examples) {
  FilterOnIndex d(3, {make_index_set(3, {0, 1}), make_index_set(3, {1, 2})});
  EXPECT_EQ(members(d.kernel()), std::vector<int>{1});
  EXPECT_TRUE(d.member(std::vector<int>{1}));
  EXPECT_FALSE(d.member(std::vector<int>{0, 2}));
  auto t = FilterOnIndex::trivial(3);
  EXPECT_TRUE(t.member(std::vector<int>{0, 1, 2}));
  EXPECT_FALSE(t.member(std::vector<int>{0, 1}));
  EXPECT_THROW(d.member(std::vector<int>{3}), InvalidInput);
  EXPECT_THROW(FilterOnIndex(2, {make_index_set(2, {0}), make_index_set(2, {1})}), InvalidInput);
}

TEST(Filter, UltrafilterExamples) {
  EXPECT_TRUE(FilterOnIndex(3, {make_index_set(3, {1})}).is_ultrafilter());
  EXPECT_FALSE(FilterOnIndex(3, {make_index_set(3, {0, 1})}).is_ultrafilter());
}

// Every generating family of one or two subsets on |I| ≤ 4.
TEST(Filter, MembershipMatchesSaturationOracle) {
  for (int n = 1; n <= 4; ++n) {
    const unsigned all = 1U << n;
    for (unsigned g1 = 0; g1 < all; ++g1)
      for (unsigned g2 = g1; g2 < all; ++g2) {
        if ((g1 & g2) == 0) continue;
        FilterOnIndex d(n, {from_mask(n, g1), from_mask(n, g2)});
        auto fam = saturate(n, {g1, g2});
        for (unsigned x = 0; x < all; ++x) ASSERT_EQ(d.member(from_mask(n, x)), fam.count(x) == 1);
        // filter laws on the predicate itself
        for (unsigned x = 0; x < all; ++x)
          for (unsigned y = 0; y < all; ++y) {
            const bool mx = d.member(from_mask(n, x)), my = d.member(from_mask(n, y));
            if (mx && (x & y) == x) {
              ASSERT_TRUE(my);
            }
            if (mx && my) {
              ASSERT_TRUE(d.member(from_mask(n, x & y)));
            }
          }
      }
  }
}

TEST(Filter, UltrafilterCharacterizationsAgree) {
  for (int n = 1; n <= 4; ++n) {
    const unsigned all = 1U << n;
    for (unsigned g = 1; g < all; ++g) {
      FilterOnIndex d(n, {from_mask(n, g)});
      bool exactly_one = true;
      for (unsigned x = 0; x < all; ++x)
        exactly_one = exactly_one && (d.member(from_mask(n, x)) != d.member(from_mask(n, (all - 1) & ~x)));
      ASSERT_EQ(d.is_ultrafilter(), exactly_one);
    }
  }
}

TEST(Regularity, WitnessValidation) {
  auto d = FilterOnIndex::principal(3, 1);
  RegularityWitness ok({make_index_set(3, {1}), make_index_set(3, {0, 1})}, 2);
  EXPECT_TRUE(ok.validate(d).ok());
  EXPECT_EQ(ok.multiplicity_set(1), (std::vector<int>{0, 1}));
  RegularityWitness tight({make_index_set(3, {1}), make_index_set(3, {0, 1})}, 1);
  EXPECT_EQ(tight.validate(d).over_cap, std::vector<int>{1});
  RegularityWitness bad({make_index_set(3, {0})}, 1);
  EXPECT_EQ(bad.validate(d).non_members, std::vector<int>{0});
}

TEST(ReducedProduct, TrivialFilterIsDirectProduct) {
  auto p = reduced_product({make_chain(2), make_chain(2)}, FilterOnIndex::trivial(2));
  ASSERT_EQ(p.quotient().size(), 4);
  // element-for-element: class k is the k-th choice function in lex order
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      auto fa = p.decode(static_cast<std::size_t>(a)), fb = p.decode(static_cast<std::size_t>(b));
      EXPECT_EQ(p.class_of(fa), a);
      EXPECT_EQ(p.quotient().holds(0, std::vector<Element>{a, b}), fa[0] < fb[0] && fa[1] < fb[1]);
    }
}

TEST(ReducedProduct, PrincipalIsIsomorphicToFactor) {
  auto structures = mftest::all_binary_structures(3);
  for (int j = 0; j < 3; ++j) {
    std::vector<Structure> fs{structures[3], structures[20], structures[11]};
    auto p = reduced_product(fs, FilterOnIndex::principal(3, j));
    const auto& mj = fs[static_cast<std::size_t>(j)];
    ASSERT_EQ(p.quotient().size(), mj.size());
    for (int a = 0; a < mj.size(); ++a)
      for (int b = 0; b < mj.size(); ++b) {
        const int ca = static_cast<int>(p.representatives()[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)]);
        const int cb = static_cast<int>(p.representatives()[static_cast<std::size_t>(b)][static_cast<std::size_t>(j)]);
        EXPECT_EQ(p.quotient().holds(0, std::vector<Element>{a, b}), mj.holds(0, std::vector<Element>{ca, cb}));
      }
  }
}

TEST(ReducedProduct, Errors) {
  Structure p(Vocabulary({{"P", 1}}), 2);
  EXPECT_THROW(reduced_product({make_chain(2), p}, FilterOnIndex::trivial(2)), VocabularyError);
  EXPECT_THROW(reduced_product({make_chain(2)}, FilterOnIndex::trivial(2)), InvalidInput);
  auto big = reduced_product({make_chain(3), make_chain(3)}, FilterOnIndex::trivial(2), 5);
  EXPECT_FALSE(big.materialized());
  EXPECT_THROW(big.quotient(), BudgetExceeded);
}

// Swapping any argument for another member of its class never changes a
// relation verdict. Exhaustive on |I| ≤ 3, Z ≤ 3 over seeded factor choices
// and every filter generated by one set.
TEST(ReducedProduct, RepresentativeIndependence) {
  auto structures = mftest::all_binary_structures(3);
  std::mt19937_64 rng(4);
  for (int n = 1; n <= 3; ++n)
    for (unsigned g = 1; g < (1U << n); ++g)
      for (int trial = 0; trial < 4; ++trial) {
        std::vector<Structure> fs;
        for (int i = 0; i < n; ++i) fs.push_back(structures[rng() % structures.size()]);
        auto p = reduced_product(fs, FilterOnIndex(n, {from_mask(n, g)}));
        std::vector<ChoiceFunction> all;
        p.for_each_function([&](const ChoiceFunction& f) { all.push_back(f); });
        for (const auto& f1 : all)
          for (const auto& f2 : all) {
            const std::vector<ChoiceFunction> args{f1, f2};
            const bool v = p.holds(0, args);
            ASSERT_EQ(v, p.quotient().holds(0, std::vector<Element>{p.class_of(f1), p.class_of(f2)}));
            for (const auto& h : all)
              if (p.equivalent(h, f1)) {
                ASSERT_EQ(p.holds(0, std::vector<ChoiceFunction>{h, f2}), v);
              }
          }
      }
}

TEST(Los, Examples) {
  Vocabulary vp({{"P", 1}});
  Structure all_p(vp, 2), none_p(vp, 2);
  all_p.set(0, std::vector<Element>{0});
  all_p.set(0, std::vector<Element>{1});
  auto forall_p = parse_formula("forall x0. P(x0)", vp);
  auto v = los_check({all_p, none_p}, FilterOnIndex::principal(2, 0), forall_p);
  EXPECT_TRUE(v.product);
  EXPECT_TRUE(v.factor);
  auto taut = parse_formula("exists x0. x0=x0", vp);
  EXPECT_TRUE(los_check({all_p, none_p}, FilterOnIndex::principal(2, 1), taut).agree());
  EXPECT_THROW(los_check({all_p, none_p}, FilterOnIndex::trivial(2), taut), PreconditionFailure);
  EXPECT_THROW(los_check({all_p, none_p}, FilterOnIndex::principal(2, 0), parse_formula("P(x0)", vp)), InvalidInput);
}

}  // namespace
