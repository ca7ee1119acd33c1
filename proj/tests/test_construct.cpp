#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace branchnet;
using namespace testing_support;

TEST(Cone, TwoAtomExample) {
  const Chain0 mm{2, 1, {{{1, 0}, {1}}}}, mp{2, 1, {{{0, 1}, {1}}}};
  const Chain1 T = cone(difference(mp, mm), {0, 0});
  ASSERT_EQ(T.edges.size(), 2u);
  const Chain1 expect = canonicalize(Chain1{2, 1, {{{1, 0}, {0, 0}, {1}}, {{0, 0}, {0, 1}, {1}}}, false});
  EXPECT_TRUE(chains_equal(T, expect, 0.0));
  EXPECT_EQ(max_weight_error(divergence(T), difference(mm, mp)), 0.0);
}

TEST(Cone, EqualMeasuresGiveEmptyChain) {
  const Chain0 mu{2, 2, {{{1, 0}, {1, 2}}, {{0, 3}, {0, 1}}}};
  EXPECT_TRUE(cone(difference(mu, mu), {0.5, 0.5}).edges.empty());
}

TEST(Cone, AtomAtTheVertexContributesNothing) {
  const Chain0 mm{2, 1, {{{0, 0}, {1}}}}, mp{2, 1, {{{2, 0}, {1}}}};
  const Chain1 T = cone(difference(mp, mm), {0, 0});
  ASSERT_EQ(T.edges.size(), 1u);
  EXPECT_EQ(max_weight_error(divergence(T), difference(mm, mp)), 0.0);
}

TEST(Cone, ThreeAtomsTwoCommodities) {
  const Chain0 mm{2, 2, {{{0, 0}, {1, 0}}, {{1, 0}, {0, 2}}}};
  const Chain0 mp{2, 2, {{{0.5, 1}, {1, 2}}}};
  const Chain1 T = cone(difference(mp, mm), {0.3, 0.4});
  // divergence by direct summation over the three edges
  Weight at_vertex(2, 0.0);
  for (const Edge& e : T.edges) {
    if (e.a == Point{0.3, 0.4}) detail::axpy(1.0, e.theta, at_vertex);
    if (e.b == Point{0.3, 0.4}) detail::axpy(-1.0, e.theta, at_vertex);
  }
  EXPECT_NEAR(at_vertex[0], 0.0, 1e-15);
  EXPECT_NEAR(at_vertex[1], 0.0, 1e-15);
  EXPECT_LT(max_weight_error(divergence(T), difference(mm, mp)), 1e-12);
}

TEST(Cone, RandomCompatiblePairs) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 2, m = 1 + trial % 3;
    auto [mm, mp] = random_compatible(rng, n, m, 1 + trial % 20, 1 + (trial * 7) % 20);
    const Chain1 T = cone(difference(mp, mm), random_point(rng, n));
    EXPECT_LT(max_weight_error(divergence(T), difference(mm, mp)), 1e-12);
  }
}

TEST(ShiftedGrid, DyadicAtomsNeedAShift) {
  // atoms at dyadic points sit on the skeleton of the unshifted grid
  const Chain0 mu{2, 1, {{{0.5, 0.5}, {1}}, {{0.25, 0.75}, {1}}}};
  DyadicGrid plain{{{0, 0}, 1.0}, 3, {0, 0}};
  const Chain0 ms[] = {mu};
  EXPECT_EQ(skeleton_clearance(plain, ms, 3), 0.0);
  EXPECT_THROW(dyadic_approx(mu, plain, 2), InputError);
  const DyadicGrid g = shifted_grid({{0, 0}, 1.0}, ms, 3);
  EXPECT_GT(skeleton_clearance(g, ms, 3), kDefaultEpsGeom * g.q.side);
  EXPECT_TRUE(g.q.contains(Point{0, 0}));
  EXPECT_TRUE(g.q.contains(Point{1, 1}));
}

TEST(ShiftedGrid, EmptyListAndFewTries) {
  const DyadicGrid g = shifted_grid({{0, 0, 0}, 2.0}, std::span<const Chain0>{}, 5);
  EXPECT_EQ(g.q.side, 4.0);
  std::mt19937_64 rng(3);
  const Chain0 mu = random_measure(rng, 2, 1, 100);
  const Chain0 ms[] = {mu};
  int tries = 0;
  shifted_grid({{0, 0}, 1.0}, ms, 8, 16, 11, kDefaultEpsGeom, &tries);
  EXPECT_LE(tries, 3);
}

TEST(ShiftedGrid, ExhaustionReportsClearance) {
  const Chain0 mu{2, 1, {{{0.5, 0.5}, {1}}}};
  const Chain0 ms[] = {mu};
  try {
    shifted_grid({{0, 0}, 1.0}, ms, 2, 4, 1, 0.5);  // clearance can never exceed 0.5 * side
    FAIL() << "expected failure";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("clearance"), std::string::npos);
  }
  const Chain0 outside{2, 1, {{{2.0, 0.5}, {1}}}};
  const Chain0 os[] = {outside};
  EXPECT_THROW(shifted_grid({{0, 0}, 1.0}, os, 2), InputError);
}

TEST(DyadicApprox, Examples) {
  DyadicGrid g{{{0, 0}, 1.0}, 4, {0, 0}};
  const Chain0 one{2, 1, {{{0.1, 0.2}, {3}}}};
  const Chain0 a1 = dyadic_approx(one, g, 2);
  ASSERT_EQ(a1.atoms.size(), 1u);
  EXPECT_EQ(a1.atoms[0].position, (Point{0.125, 0.125}));
  EXPECT_EQ(a1.atoms[0].weight, Weight{3});

  const Chain0 two{2, 2, {{{0.1, 0.1}, {1, 0}}, {{0.2, 0.15}, {0, 1}}}};
  const Chain0 a2 = dyadic_approx(two, g, 1);
  ASSERT_EQ(a2.atoms.size(), 1u);
  EXPECT_EQ(a2.atoms[0].weight, (Weight{1, 1}));
  EXPECT_EQ(a2.atoms[0].position, (Point{0.25, 0.25}));

  // fine enough level: bijective relocation
  const Chain0 a3 = dyadic_approx(two, g, 4);
  EXPECT_EQ(a3.atoms.size(), 2u);
  EXPECT_EQ(total_weight(a3), total_weight(two));
}

TEST(Cascade, EqualMeasuresGiveEmptyChain) {
  std::mt19937_64 rng(1);
  const Chain0 mu = random_measure(rng, 2, 2, 10);
  const Chain0 ms[] = {mu};
  const DyadicGrid g = shifted_grid({{0, 0}, 1.0}, ms, 5);
  const auto r = cascade(mu, mu, g, 4, CostSpec::sum_alpha(0.5, {1, 1}), BetaEnvelope::power(0.75));
  EXPECT_TRUE(r.chain.edges.empty());
  EXPECT_EQ(r.certificate.energy, 0.0);
}

TEST(Cascade, SameCellAtomsGiveAPolyline) {
  const Chain0 mm{2, 1, {{{0.40, 0.40}, {1}}}}, mp{2, 1, {{{0.4 + 1e-4, 0.4 + 1e-4}, {1}}}};
  const Chain0 ms[] = {mm, mp};
  const DyadicGrid g = shifted_grid({{0.4, 0.4}, 1e-4}, ms, 4);
  const auto r = cascade(mm, mp, g, 3, CostSpec::sum_alpha(1.0, {1}), BetaEnvelope::power(1.0));
  EXPECT_EQ(max_weight_error(divergence(r.chain), difference(mm, mp)), 0.0);
  EXPECT_GT(r.chain.edges.size(), 0u);
}

TEST(Cascade, DivergenceExactAndBoundHolds) {
  std::mt19937_64 rng(12);
  const auto cost = CostSpec::sum_alpha(0.75, {1.0});
  const auto beta = BetaEnvelope::power(0.75);
  for (int trial = 0; trial < 10; ++trial) {
    Chain0 mm{2, 1, {}}, mp{2, 1, {}};
    for (int i = 0; i < 64; ++i) {
      mm.atoms.push_back({random_point(rng, 2), {1.0}});
      mp.atoms.push_back({random_point(rng, 2), {1.0}});
    }
    const Chain0 ms[] = {mm, mp};
    const DyadicGrid g = shifted_grid({{0, 0}, 1.0}, ms, 7, 16, trial + 1);
    const auto r = cascade(mm, mp, g, 6, cost, beta);
    EXPECT_LT(max_weight_error(divergence(r.chain), difference(mm, mp)), 1e-12);
    EXPECT_TRUE(r.certificate.satisfied()) << r.certificate.energy << " > " << r.certificate.bound;
    EXPECT_TRUE(r.beta_dominates);
    EXPECT_TRUE(r.beta_admissible);
  }
}

TEST(Cascade, PerLevelTelescoping) {
  // divergence of the level-k cones of one sign is sigma^k - sigma^{k+1}
  std::mt19937_64 rng(2);
  const Chain0 mu = random_measure(rng, 2, 2, 30);
  const Chain0 ms[] = {mu};
  const DyadicGrid g = shifted_grid({{0, 0}, 1.0}, ms, 6);
  for (int k = 0; k < 5; ++k) {
    const Chain0 coarse = dyadic_approx(mu, g, k), fine = dyadic_approx(mu, g, k + 1);
    Chain1 level{2, 2, {}, false};
    for (const Atom& child : fine.atoms) {
      const Point parent = g.cell_center(g.cell_index(child.position, k), k);
      level.edges.push_back({parent, child.position, child.weight});
    }
    EXPECT_LT(max_weight_error(divergence(canonicalize(level)), difference(coarse, fine)), 1e-12);
  }
}

TEST(Cascade, RejectsIncompatibleAndShallowGrid) {
  const Chain0 mm{2, 1, {{{0.3, 0.3}, {1}}}}, mp{2, 1, {{{0.6, 0.6}, {2}}}};
  const Chain0 ms[] = {mm, mp};
  const DyadicGrid g = shifted_grid({{0, 0}, 1.0}, ms, 3);
  const auto c = CostSpec::sum_alpha(0.5, {1});
  EXPECT_THROW(cascade(mm, mp, g, 2, c, BetaEnvelope::power(0.75)), InputError);
  const Chain0 mp1{2, 1, {{{0.6, 0.6}, {1}}}};
  EXPECT_THROW(cascade(mm, mp1, g, 3, c, BetaEnvelope::power(0.75)), InputError);
}

TEST(Cascade, InadmissibleBetaIsOnlyAWarning) {
  const Chain0 mm{2, 1, {{{0.3, 0.3}, {1}}}}, mp{2, 1, {{{0.6, 0.7}, {1}}}};
  const Chain0 ms[] = {mm, mp};
  const DyadicGrid g = shifted_grid({{0, 0}, 1.0}, ms, 3);
  const auto r = cascade(mm, mp, g, 2, CostSpec::sum_alpha(0.5, {1}), BetaEnvelope::power(0.5));
  EXPECT_FALSE(r.beta_admissible);
  EXPECT_EQ(max_weight_error(divergence(r.chain), difference(mm, mp)), 0.0);
}
