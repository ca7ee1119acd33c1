#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "support.hpp"

using namespace branchnet;
using namespace testing_support;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("branchnet_test_" + name)).string();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string io_error(const std::string& text) {
  const std::string p = tmp_path("bad.json");
  write(p, text);
  try {
    load_measure(p);
  } catch (const IoError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(MeasureIo, MinimalFile) {
  const std::string p = tmp_path("two_atoms.json");
  write(p, R"({"version":1,"n":2,"m":1,"atoms":[{"p":[0,0],"w":[1]},{"p":[1,0.5],"w":[-1]}]})");
  const Chain0 nu = load_measure(p);
  ASSERT_EQ(nu.atoms.size(), 2u);
  EXPECT_EQ(nu.atoms[1].position, (Point{1, 0.5}));
  EXPECT_EQ(nu.atoms[1].weight, Weight{-1});
}

TEST(MeasureIo, RoundTripIsExact) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    Chain0 nu = random_measure(rng, 2 + trial % 3, 1 + trial % 3, 10, false);
    nu.atoms[0].weight[0] = 0.1 + 1e-17 * trial;
    nu.atoms[1].position[0] = std::nextafter(1.0 / 3.0, 1.0);
    const std::string p = tmp_path("rt.json");
    save_measure(nu, p);
    const Chain0 back = load_measure(p);
    ASSERT_EQ(back.atoms.size(), nu.atoms.size());
    for (std::size_t i = 0; i < nu.atoms.size(); ++i) {
      EXPECT_EQ(back.atoms[i].position, nu.atoms[i].position);
      EXPECT_EQ(back.atoms[i].weight, nu.atoms[i].weight);
    }
  }
}

TEST(MeasureIo, ErrorsCarryTheLocation) {
  EXPECT_NE(io_error(R"({"version":1,"n":2,"m":2,"atoms":[{"p":[0,0],"w":[1,0]},{"p":[1,0],"w":[1]}]})")
                .find("atoms[1].w"),
            std::string::npos);
  EXPECT_NE(io_error(R"({"version":1,"n":2,"m":1,"atoms":[{"p":[0],"w":[1]}]})").find("atoms[0].p"),
            std::string::npos);
  EXPECT_NE(io_error(R"({"version":1,"n":2,"m":1,"atoms":[)").find("parse error"), std::string::npos);
  EXPECT_NE(io_error(R"({"version":1,"n":2,"atoms":[]})").find(".m: missing field"), std::string::npos);
  EXPECT_NE(io_error(R"({"version":2,"n":2,"m":1,"atoms":[]})").find("version"), std::string::npos);
  EXPECT_NE(io_error(R"({"version":1,"n":2,"m":1,"atoms":[{"p":[0,"x"],"w":[1]}]})").find("atoms[0].p[1]"),
            std::string::npos);
  EXPECT_THROW(load_measure(tmp_path("does_not_exist.json")), IoError);
}

TEST(NetworkIo, RoundTripAndCanonicalEquality) {
  std::mt19937_64 rng(5);
  const Chain1 T = canonicalize(random_chain(rng, 3, 2, 8));
  const std::string p = tmp_path("net.json");
  save_network(T, p);
  const Chain1 back = load_network(p);
  ASSERT_EQ(back.edges.size(), T.edges.size());
  for (std::size_t i = 0; i < T.edges.size(); ++i) {
    EXPECT_EQ(back.edges[i].a, T.edges[i].a);
    EXPECT_EQ(back.edges[i].theta, T.edges[i].theta);
  }
  EXPECT_TRUE(chains_equal(canonicalize(back), T, 0.0));
}

TEST(NetworkIo, Errors) {
  const std::string p = tmp_path("badnet.json");
  write(p, R"({"version":1,"n":2,"m":1,"edges":[{"a":[0,0],"b":[0,0],"theta":[1]}]})");
  EXPECT_THROW(load_network(p), IoError);
  write(p, R"({"version":1,"n":2,"m":1,"edges":[{"a":[0,0],"b":[1,0]}]})");
  try {
    load_network(p);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("edges[0].theta"), std::string::npos);
  }
}

TEST(ConfigIo, WorkspaceRoundTrip) {
  WorkspaceConfig w;
  w.m = 2;
  w.cost = "sum-alpha:0.75,0.5,0.5";
  w.seed = 42;
  w.optimizer.moves = {Move::Relocate, Move::MergeSplit};
  w.optimizer.init = InitKind::Cascade;
  const WorkspaceConfig back = workspace_from_json(to_json(w));
  EXPECT_EQ(back.m, 2);
  EXPECT_EQ(back.cost, w.cost);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.optimizer.moves, w.optimizer.moves);
  EXPECT_EQ(back.optimizer.init, InitKind::Cascade);
  EXPECT_EQ(back.make_cost().params(), (std::vector<double>{0.75, 0.5, 0.5}));
}

TEST(ConfigIo, RejectsBadContent) {
  EXPECT_THROW(optimizer_config_from_json(nlohmann::json{{"speed", 3}}), IoError);
  EXPECT_THROW(optimizer_config_from_json(nlohmann::json{{"rel_tol", 0.0}}), IoError);
  EXPECT_THROW(optimizer_config_from_json(nlohmann::json{{"moves", {"teleport"}}}), IoError);
  EXPECT_THROW(optimizer_config_from_json(nlohmann::json{{"max_iters", "many"}}), IoError);
  auto j = to_json(WorkspaceConfig{});
  j["cost"] = "sum-alpha:0.5,1,1";  // three params for m = 1
  EXPECT_THROW(workspace_from_json(j), IoError);
  j = to_json(WorkspaceConfig{});
  j["n"] = 1;
  EXPECT_THROW(workspace_from_json(j), IoError);
}

TEST(Svg, YNetworkAndEmptyCanvas) {
  const Chain0 mm{2, 1, {{{-1, 0}, {1}}, {{1, 0}, {1}}}}, mp{2, 1, {{{0, 2}, {2}}}};
  const Chain1 Y = canonicalize(
      Chain1{2, 1, {{{-1, 0}, {0, 1}, {1}}, {{1, 0}, {0, 1}, {1}}, {{0, 1}, {0, 2}, {2}}}, false});
  const std::string svg = render_svg(Y, mm, mp);
  std::size_t lines = 0;
  for (std::size_t pos = 0; (pos = svg.find("<line", pos)) != std::string::npos; ++pos) ++lines;
  EXPECT_EQ(lines, 3u);
  // trunk (theta 2) is drawn with the maximal stroke, the arms thinner
  EXPECT_NE(svg.find("stroke-width=\"10\""), std::string::npos);
  EXPECT_NE(svg.find("stroke-width=\"7.07107\""), std::string::npos);

  const std::string empty = render_svg(Chain1{2, 1, {}, true}, Chain0{2, 1, {}}, Chain0{2, 1, {}});
  EXPECT_EQ(empty.find("<line"), std::string::npos);
  EXPECT_EQ(empty.find("<circle"), std::string::npos);
}

TEST(Svg, ThreeDimensionsNeedProjection) {
  const Chain1 T = canonicalize(Chain1{3, 1, {{{0, 0, 0}, {1, 1, 1}, {1}}}, false});
  const Chain0 none{3, 1, {}};
  EXPECT_THROW(render_svg(T, none, none), InputError);
  SvgStyle s;
  s.project = true;
  EXPECT_NE(render_svg(T, none, none, s).find("<line"), std::string::npos);
}
