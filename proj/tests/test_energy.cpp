#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace branchnet;
using namespace testing_support;

TEST(Energy, SegmentAndErrors) {
  const auto c = CostSpec::sum_alpha(0.5, {1.0});
  Chain1 T{2, 1, {{{0, 0}, {3, 4}, {4}}}, false};
  EXPECT_THROW(energy(T, c), InputError);
  T = canonicalize(T);
  EXPECT_DOUBLE_EQ(energy(T, c), 10.0);
  EXPECT_THROW(energy(T, CostSpec::sum_alpha(0.5, {1.0, 1.0})), InputError);
  EXPECT_DOUBLE_EQ(energy(Chain1{2, 1, {}, true}, c), 0.0);
}

TEST(Energy, ComponentEnergies) {
  const auto c = CostSpec::sum_alpha(0.5, {1.0, 1.0});
  const Chain1 T = canonicalize(Chain1{2, 2, {{{0, 0}, {1, 0}, {1, 4}}}, false});
  EXPECT_DOUBLE_EQ(energy(T, c), std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(energy_component(T, c, 0), 1.0);
  EXPECT_DOUBLE_EQ(energy_component(T, c, 1), 2.0);
}

TEST(Energy, RawEnergyDominatesCanonical) {
  std::mt19937_64 rng(31);
  const auto c = CostSpec::pnorm_alpha(2, 2.0, 0.6);
  for (int trial = 0; trial < 100; ++trial) {
    Chain1 T = random_chain(rng, 2, 2, 6);
    // add overlapping copies so canonicalization merges
    const Chain1 S = T;
    T = concat(T, S);
    EXPECT_LE(energy(canonicalize(T), c), raw_energy(T, c) * (1 + 1e-12));
  }
}

TEST(Energy, SubadditivityAndComponentSandwich) {
  std::mt19937_64 rng(4);
  const auto c = CostSpec::sum_alpha(0.7, {1.0, 0.5, 2.0});
  for (int trial = 0; trial < 200; ++trial) {
    const Chain1 T = canonicalize(random_chain(rng, 2, 3, 5));
    const Chain1 S = canonicalize(random_chain(rng, 2, 3, 5));
    const double eT = energy(T, c), eS = energy(S, c);
    EXPECT_LE(energy(sum(T, S), c), (eT + eS) * (1 + 1e-10));
    double lifts = 0.0;
    for (int j = 0; j < 3; ++j) lifts += energy_component(T, c, j);
    EXPECT_LE(eT, lifts * (1 + 1e-10));
    EXPECT_LE(lifts, 3 * eT * (1 + 1e-10));
  }
}

TEST(Energy, RestrictionIsAdditive) {
  std::mt19937_64 rng(6);
  const auto c = CostSpec::sum_alpha(0.5, {1.0});
  for (int trial = 0; trial < 100; ++trial) {
    const Chain1 T = canonicalize(random_chain(rng, 2, 1, 6));
    const Box B{{0.2, 0.1}, {0.7, 0.9}};
    EXPECT_NEAR(energy(restrict(T, B), c) + energy(restrict_complement(T, B), c), energy(T, c), 1e-10);
  }
}

TEST(MassBound, ClosedFormCases) {
  // C = |theta|: both terms equal 1
  const auto lin = mass_bound_constant(CostSpec::sum_alpha(1.0, {1.0}), 3.0, 200);
  EXPECT_NEAR(lin.constant, 1.0, 1e-12);
  // C = |theta|^{1/2}, boundary mass 4: ratio term 4/2, no finite derivative
  const auto sq = mass_bound_constant(CostSpec::sum_alpha(0.5, {1.0}), 4.0, 200);
  EXPECT_EQ(sq.inverse_derivative_term, 0.0);
  EXPECT_NEAR(sq.constant, 2.0, 1e-12);
  // m factor
  const auto two = mass_bound_constant(CostSpec::pnorm_alpha(2, 2.0, 1.0), 1.0, 500);
  EXPECT_NEAR(two.constant, 2.0, 1e-9);
  EXPECT_THROW(mass_bound_constant(CostSpec::sum_alpha(1.0, {1.0}), 0.0), InputError);
}

TEST(Digest, StableAndSensitive) {
  Chain0 a{2, 1, {{{0, 0}, {1}}}};
  Chain0 b = a;
  EXPECT_EQ(digest(a), digest(b));
  b.atoms[0].weight[0] = 1.0000000001;
  EXPECT_NE(digest(a), digest(b));
}
