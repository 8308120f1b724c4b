#include <gtest/gtest.h>

#include "support/brute_force.hpp"
#include "triest/oracle.hpp"
#include "triest/stream.hpp"

using namespace triest;

namespace {

ExactCounter run(const StreamSpec& s) {
  ExactCounter c(s.mode);
  for (const auto& ev : s.events) c.process(ev);
  return c;
}

std::vector<Edge> edges_of(const StreamSpec& s) {
  std::vector<Edge> out;
  for (const auto& ev : s.events) out.push_back(ev.edge);
  return out;
}

// A random strict fully-dynamic stream on n vertices.
StreamSpec random_dynamic(GraphMode mode, VertexId n, int steps, std::uint64_t seed, int labels = 1) {
  Rng rng(seed);
  StreamSpec s{mode, {}};
  std::vector<Edge> live;
  for (int i = 0; i < steps; ++i) {
    if (!live.empty() && flip_coin(rng, 0.3)) {
      const std::size_t k = uniform_index(rng, live.size());
      EdgeEvent ev{Op::Delete, live[k], mode == GraphMode::Multigraph, {}};
      s.events.push_back(ev);
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(k));
      continue;
    }
    const VertexId a = uniform_index(rng, n), b = uniform_index(rng, n);
    if (a == b) continue;
    const Edge e = Edge::make(a, b, mode == GraphMode::Multigraph ? static_cast<Label>(uniform_index(rng, labels)) : 0);
    if (std::find(live.begin(), live.end(), e) != live.end()) continue;
    s.events.push_back({Op::Insert, e, mode == GraphMode::Multigraph, {}});
    live.push_back(e);
  }
  return s;
}

}  // namespace

TEST(ExactCounter, Cliques) {
  const auto k3 = run(clique_stream(3));
  EXPECT_EQ(k3.total(), 1);
  for (VertexId v = 0; v < 3; ++v) EXPECT_EQ(k3.local(v), 1);

  auto k5 = run(clique_stream(5));
  EXPECT_EQ(k5.total(), 10);
  for (VertexId v = 0; v < 5; ++v) EXPECT_EQ(k5.local(v), 6);
  k5.process(EdgeEvent::remove(0, 1));
  EXPECT_EQ(k5.total(), 7);
  EXPECT_EQ(k5.local(0), 3);
  EXPECT_EQ(k5.local(2), 5);
}

TEST(ExactCounter, DeletingEverythingReturnsToZero) {
  auto s = clique_stream(6);
  const std::size_t n = s.events.size();
  for (std::size_t i = 0; i < n; ++i) s.events.push_back({Op::Delete, s.events[i].edge, false, {}});
  const auto c = run(s);
  EXPECT_EQ(c.total(), 0);
  EXPECT_TRUE(c.counters().locals().empty());
}

TEST(ExactCounter, RejectsIneffectiveOperations) {
  ExactCounter c;
  c.process(EdgeEvent::insert(1, 2));
  EXPECT_THROW(c.process(EdgeEvent::insert(2, 1)), InvariantViolation);
  EXPECT_THROW(c.process(EdgeEvent::remove(3, 4)), InvariantViolation);
  EXPECT_EQ(c.total(), 0);
  EXPECT_EQ(c.graph().size(), 1u);
}

TEST(ExactCounter, MatchesEnumerationAtEveryPrefix) {
  for (auto mode : {GraphMode::Graph, GraphMode::Multigraph}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = random_dynamic(mode, 9, 120, seed, 3);
      ASSERT_TRUE(validate_stream(s).ok());
      ExactCounter c(mode);
      for (std::size_t i = 0; i < s.events.size(); ++i) {
        c.process(s.events[i]);
        const auto want = brute::brute_stats(brute::replay(s.events, i + 1));
        ASSERT_EQ(c.total(), want.total);
        std::map<VertexId, std::int64_t> got(c.counters().locals().begin(), c.counters().locals().end());
        ASSERT_EQ(got, want.locals);
      }
    }
  }
}

TEST(PairStats, Examples) {
  const auto k5 = pair_stats(run(clique_stream(5)).graph());
  EXPECT_EQ(k5.total, 10);
  EXPECT_EQ(k5.r, 30);
  EXPECT_EQ(k5.w, 15);
  EXPECT_EQ(k5.h, 3);

  const auto one = pair_stats(run(clique_stream(3)).graph());
  EXPECT_EQ(one.total, 1);
  EXPECT_EQ(one.r, 0);
  EXPECT_EQ(one.w, 0);
  EXPECT_EQ(one.h, 1);

  StreamSpec two{GraphMode::Graph,
                 {EdgeEvent::insert(1, 2), EdgeEvent::insert(2, 3), EdgeEvent::insert(1, 3),
                  EdgeEvent::insert(4, 5), EdgeEvent::insert(5, 6), EdgeEvent::insert(4, 6)}};
  const auto st = pair_stats(run(two).graph());
  EXPECT_EQ(st.r, 0);
  EXPECT_EQ(st.w, 1);
}

TEST(PairStats, DoubledEdgeMultigraph) {
  // triangle 1-2-3 with (1,2) doubled: two triangles sharing two edges
  StreamSpec s{GraphMode::Multigraph,
               {EdgeEvent::insert(1, 2, 0), EdgeEvent::insert(1, 2, 1), EdgeEvent::insert(2, 3, 0),
                EdgeEvent::insert(1, 3, 0)}};
  const auto st = pair_stats(run(s).graph());
  EXPECT_EQ(st.total, 2);
  EXPECT_EQ(st.r1, 0);
  EXPECT_EQ(st.r2, 1);
  EXPECT_EQ(st.q, 0);
  EXPECT_EQ(st.h, 2);
}

TEST(PairStats, MatchesBruteForce) {
  for (auto mode : {GraphMode::Graph, GraphMode::Multigraph}) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto s = random_dynamic(mode, 10, 90, 100 + seed, 3);
      const auto c = run(s);
      const auto got = pair_stats(c.graph());
      const auto want = brute::brute_stats(brute::replay(s.events, s.events.size()));
      ASSERT_EQ(got.total, want.total);
      ASSERT_EQ(got.r1, want.share1);
      ASSERT_EQ(got.r2, want.share2);
      ASSERT_EQ(got.q, want.share0);
      ASSERT_EQ(got.h, want.h);
      ASSERT_EQ(got.locals, want.locals);
      ASSERT_EQ(got.r1 + got.r2 + got.q, choose2(got.total));
      if (mode == GraphMode::Graph) {
        ASSERT_EQ(got.r2, 0);
        ASSERT_EQ(got.r + got.w, choose2(got.total));
      }
    }
  }
}

TEST(ZStat, ShortStreamsAreZero) {
  const auto k5 = clique_stream(5);
  EXPECT_EQ(z_stat(k5.events, 9), 0);
  EXPECT_EQ(z_stat(k5.events, 10), 0);
  EXPECT_EQ(z_stat(k5.events, 6, 7), 0);
}

TEST(ZStat, SharedEdgeArrivingLastIsExcluded) {
  // triangles {0,1,2} and {0,1,3} share (0,1)
  StreamSpec first{GraphMode::Graph,
                   {EdgeEvent::insert(0, 1), EdgeEvent::insert(0, 2), EdgeEvent::insert(1, 2),
                    EdgeEvent::insert(0, 3), EdgeEvent::insert(1, 3)}};
  EXPECT_EQ(z_stat(first.events, 1), 1);
  EXPECT_EQ(z_stat(first.events, 2), 0);  // first triangle completes at t = 3 = M + 1
  StreamSpec last{GraphMode::Graph,
                  {EdgeEvent::insert(0, 2), EdgeEvent::insert(1, 2), EdgeEvent::insert(0, 3),
                   EdgeEvent::insert(1, 3), EdgeEvent::insert(0, 1)}};
  EXPECT_EQ(z_stat(last.events, 1), 0);
  StreamSpec one_last{GraphMode::Graph,
                      {EdgeEvent::insert(0, 2), EdgeEvent::insert(1, 2), EdgeEvent::insert(0, 1),
                       EdgeEvent::insert(0, 3), EdgeEvent::insert(1, 3)}};
  EXPECT_EQ(z_stat(one_last.events, 1), 0);
}

TEST(ZStat, MatchesPairScan) {
  const auto k5 = clique_stream(5);
  EXPECT_EQ(z_stat(k5.events, 6), brute::brute_z(edges_of(k5), 6));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = reorder(erdos_renyi_stream(11, 0.5, seed), Order::Uar, seed);
    const auto edges = edges_of(s);
    for (std::uint64_t M : {0u, 3u, 6u, 10u}) {
      ASSERT_EQ(z_stat(s.events, M), brute::brute_z(edges, M));
      const std::size_t half = edges.size() / 2;
      ASSERT_EQ(z_stat(s.events, M, half), brute::brute_z({edges.begin(), edges.begin() + half}, M));
    }
  }
}
