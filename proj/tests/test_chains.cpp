#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace branchnet;
using namespace testing_support;

namespace {

Edge E(Point a, Point b, Weight t) { return {std::move(a), std::move(b), std::move(t)}; }

// theta of the canonical edge with endpoints {p, q}, oriented p -> q
Weight theta_between(const Chain1& T, const Point& p, const Point& q) {
  for (const Edge& e : T.edges) {
    if (detail::dist(e.a, p) < 1e-12 && detail::dist(e.b, q) < 1e-12) return e.theta;
    if (detail::dist(e.a, q) < 1e-12 && detail::dist(e.b, p) < 1e-12) return detail::negated(e.theta);
  }
  return {};
}

}  // namespace

TEST(Canonicalize, CollinearOverlapSplitsAndSums) {
  Chain1 T{2, 1, {E({0, 0}, {2, 0}, {1}), E({1, 0}, {3, 0}, {1})}, false};
  const Chain1 C = canonicalize(T);
  ASSERT_TRUE(C.canonical);
  ASSERT_EQ(C.edges.size(), 3u);
  EXPECT_EQ(theta_between(C, {0, 0}, {1, 0}), Weight{1});
  EXPECT_EQ(theta_between(C, {1, 0}, {2, 0}), Weight{2});
  EXPECT_EQ(theta_between(C, {2, 0}, {3, 0}), Weight{1});
}

TEST(Canonicalize, OppositeOrientationCancels) {
  Chain1 T{2, 2, {E({0, 0}, {1, 1}, {1, -2}), E({1, 1}, {0, 0}, {1, -2})}, false};
  EXPECT_TRUE(canonicalize(T).edges.empty());
}

TEST(Canonicalize, ProperCrossingIsSplit) {
  Chain1 T{2, 1, {E({0, 0}, {2, 2}, {1}), E({0, 2}, {2, 0}, {3})}, false};
  const Chain1 C = canonicalize(T);
  ASSERT_EQ(C.edges.size(), 4u);
  EXPECT_EQ(theta_between(C, {0, 0}, {1, 1}), Weight{1});
  EXPECT_EQ(theta_between(C, {1, 1}, {2, 0}), Weight{3});
  EXPECT_NEAR(mass(C), mass(T), 1e-12);
}

TEST(Canonicalize, TJunctionSplitsTheLongEdge) {
  Chain1 T{2, 1, {E({0, 0}, {2, 0}, {1}), E({1, 0}, {1, 1}, {1})}, false};
  EXPECT_EQ(canonicalize(T).edges.size(), 3u);
}

TEST(Canonicalize, NearbyEndpointsSnapTogether) {
  Chain1 T{2, 1, {E({0, 0}, {1, 0}, {1}), E({1 + 1e-12, 1e-12}, {2, 0}, {1})}, false};
  const Chain0 b = boundary(canonicalize(T));
  EXPECT_EQ(b.atoms.size(), 2u);  // the junction cancels
}

TEST(Canonicalize, RejectsDegenerateAndNonFinite) {
  Chain1 deg{2, 1, {E({0, 0}, {0, 0}, {1})}, false};
  EXPECT_THROW(canonicalize(deg), InputError);
  Chain1 nan{2, 1, {E({0, 0}, {1, std::nan("")}, {1})}, false};
  EXPECT_THROW(canonicalize(nan), InputError);
  Chain1 bad{2, 2, {E({0, 0}, {1, 0}, {1})}, false};
  EXPECT_THROW(canonicalize(bad), InputError);
}

TEST(Canonicalize, IdempotentAndBoundaryInvariant) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + trial % 3;
    const Chain1 T = random_chain(rng, 2 + trial % 2, m, 8);
    const Chain1 C = canonicalize(T);
    EXPECT_TRUE(chains_equal(canonicalize(C), C, 1e-12));
    EXPECT_LT(max_weight_error(boundary(T), boundary(C)), 1e-12);
    EXPECT_LE(mass(C), mass(T) + 1e-12);
  }
}

// dense random graphs produce nearly concurrent crossings; the output must
// still refine to itself with bitwise-identical vertices
TEST(Canonicalize, FixedPointOnDenseGraphs) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 300; ++trial) {
    const Chain1 C = canonicalize(random_graph_chain(rng, 2, 2, 6, 10));
    const Chain1 again = canonicalize(C);
    ASSERT_EQ(again.edges.size(), C.edges.size()) << trial;
    for (std::size_t i = 0; i < C.edges.size(); ++i) {
      EXPECT_EQ(again.edges[i].a, C.edges[i].a);
      EXPECT_EQ(again.edges[i].b, C.edges[i].b);
    }
  }
}

TEST(Boundary, PathAndDivergence) {
  Chain1 T{2, 1, {E({0, 0}, {1, 0}, {2}), E({1, 0}, {1, 1}, {2})}, false};
  const Chain0 b = boundary(T);
  ASSERT_EQ(b.atoms.size(), 2u);
  EXPECT_EQ(b.atoms[0].position, (Point{0, 0}));
  EXPECT_EQ(b.atoms[0].weight, Weight{-2});
  EXPECT_EQ(b.atoms[1].weight, Weight{2});
  const Chain0 d = divergence(T);
  EXPECT_EQ(d.atoms[0].weight, Weight{2});
  EXPECT_DOUBLE_EQ(mass(b), 4.0);
}

TEST(Boundary, AugmentationOfBoundaryVanishes) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Chain1 T = random_chain(rng, 3, 2, 6);
    for (double x : total_weight(boundary(T))) EXPECT_NEAR(x, 0.0, 1e-12);
  }
}

TEST(Mass, EuclideanMultiplicityTimesLength) {
  Chain1 T{2, 2, {E({0, 0}, {2, 0}, {3, 4})}, false};
  EXPECT_DOUBLE_EQ(mass(T), 10.0);
  Chain0 nu{2, 2, {{{0, 0}, {3, 4}}, {{1, 0}, {0, -1}}}};
  EXPECT_DOUBLE_EQ(mass(nu), 6.0);
}

TEST(Restrict, BoxAndComplementReassemble) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Chain1 T = canonicalize(random_chain(rng, 2, 2, 6));
    Point lo = random_point(rng, 2, 0.0, 0.6), hi = lo;
    for (double& x : hi) x += 0.4;
    const Box B{lo, hi};
    const Chain1 in = restrict(T, B), out = restrict_complement(T, B);
    EXPECT_TRUE(chains_equal(sum(in, out), T, 1e-10));
    EXPECT_NEAR(mass(in) + mass(out), mass(T), 1e-10);
  }
}

TEST(Restrict, SublevelKeepsTheLowPart) {
  Chain1 T{2, 1, {E({0, 0}, {2, 0}, {1})}, true};
  const Chain1 R = restrict_sublevel(T, AffineFunctional{{1, 0}, 0}, 0.5);
  ASSERT_EQ(R.edges.size(), 1u);
  EXPECT_DOUBLE_EQ(R.edges[0].length(), 0.5);
}

TEST(Components, LiftsSumToTheChain) {
  std::mt19937_64 rng(9);
  const Chain1 T = canonicalize(random_chain(rng, 2, 3, 7));
  Chain1 acc{2, 3, {}, false};
  for (int j = 0; j < 3; ++j) acc = concat(acc, component_lift(T, j));
  EXPECT_TRUE(chains_equal(canonicalize(acc), T, 1e-12));
  EXPECT_THROW(component_lift(T, 3), InputError);
}

TEST(Pieces, FractionsArePiecesAndSignFlipsAreNot) {
  Chain1 T{2, 2, {E({0, 0}, {1, 0}, {2, -1}), E({1, 0}, {1, 1}, {1, 0})}, false};
  T = canonicalize(T);
  Chain1 half = T;
  for (Edge& e : half.edges) e.theta = detail::scaled(e.theta, 0.5);
  EXPECT_TRUE(is_piece(half, T));
  EXPECT_TRUE(is_piece(component_lift(T, 1), T));
  EXPECT_FALSE(is_piece(negate(T), T));
  Chain1 over = T;
  over.edges[0].theta = detail::scaled(over.edges[0].theta, 1.5);
  EXPECT_FALSE(is_piece(over, T));
  // a sub-segment is a piece as well
  const Chain1 part = restrict(T, Box{{0, -1}, {0.5, 1}});
  EXPECT_TRUE(is_piece(part, T));
}

TEST(Measures, CanonicalMergeAndCompatibility) {
  Chain0 a{2, 2, {{{0, 0}, {1, 0}}, {{0, 0}, {0, 1}}, {{1, 1}, {1, -1}}, {{1, 1}, {-1, 1}}}};
  const Chain0 c = canonicalize(a);
  ASSERT_EQ(c.atoms.size(), 1u);
  EXPECT_EQ(c.atoms[0].weight, (Weight{1, 1}));
  Chain0 mm{2, 1, {{{0, 0}, {1}}}}, mp{2, 1, {{{1, 0}, {1}}}};
  EXPECT_TRUE(is_compatible(mm, mp));
  mp.atoms[0].weight[0] = 2;
  EXPECT_FALSE(is_compatible(mm, mp));
}
