#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace minuet;
using testing_support::sec;
using testing_support::vs;

TEST(Neighbors, HundredMetresIsLinked) {
  std::vector<VehicleState> s{vs("a", 0, 0, 0), vs("b", 0, 100, 0)};
  auto adj = neighbors(s, 100);
  EXPECT_EQ(adj[0], std::vector<std::size_t>{1});
  EXPECT_EQ(adj[1], std::vector<std::size_t>{0});
}

TEST(Neighbors, JustBeyondRangeIsNotLinked) {
  std::vector<VehicleState> s{vs("a", 0, 0, 0), vs("b", 0, 100.01, 0)};
  auto adj = neighbors(s, 100);
  EXPECT_TRUE(adj[0].empty());
  EXPECT_TRUE(adj[1].empty());
}

TEST(Neighbors, SingleVehicle) {
  std::vector<VehicleState> s{vs("a", 0, 0, 0)};
  auto adj = neighbors(s, 100);
  ASSERT_EQ(adj.size(), 1u);
  EXPECT_TRUE(adj[0].empty());
}

TEST(Neighbors, SymmetricAndMatchesBruteForce) {
  Rng r(77);
  std::vector<VehicleState> s;
  for (int i = 0; i < 40; ++i) s.push_back(vs("v" + std::to_string(i), 0, r.uniform(0, 500), r.uniform(0, 50)));
  auto adj = neighbors(s, 100);
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<std::size_t> expect;
    for (std::size_t j = 0; j < s.size(); ++j) {
      double dx = s[i].pos.x - s[j].pos.x, dy = s[i].pos.y - s[j].pos.y;
      if (i != j && dx * dx + dy * dy <= 100.0 * 100.0) expect.push_back(j);
    }
    EXPECT_EQ(adj[i], expect);
  }
}

TEST(Broadcast, TotalLossDeliversNothing) {
  std::vector<VehicleState> s{vs("a", 0, 0, 0), vs("b", 0, 50, 0)};
  RadioParams p;
  p.loss_prob = 1.0;
  Rng rng(1);
  EXPECT_TRUE(broadcast({0, 0}, 0, sec(1), s, {}, p, rng).empty());
}

TEST(Broadcast, ThreeNeighborsReplayOracle) {
  std::vector<VehicleState> s{vs("a", 0, 0, 0), vs("b", 0, 50, 0), vs("c", 0, -50, 0), vs("d", 0, 0, 99),
                              vs("far", 0, 500, 0)};
  RadioParams p;
  Rng rng(1234);
  auto out = broadcast({0, 7}, 0, sec(2), s, {}, p, rng);
  ASSERT_EQ(out.size(), 3u);
  // replay: per candidate, one loss draw then one delay draw in [10000, 30000] us
  Rng replay(1234);
  std::vector<std::size_t> expect_rx{1, 2, 3};
  for (std::size_t i = 0; i < 3; ++i) {
    (void)replay.uniform01();
    auto d_us = replay.uniform_int(10000, 30000);
    EXPECT_EQ(out[i].receiver.index, expect_rx[i]);
    EXPECT_EQ(out[i].t_recv - out[i].t_sent, SimTime::micros(d_us));
    EXPECT_GE(out[i].t_recv - out[i].t_sent, sec(0.010));
    EXPECT_LE(out[i].t_recv - out[i].t_sent, sec(0.030));
    EXPECT_EQ(out[i].t_sent, sec(2));
    EXPECT_EQ(out[i].msg_id, (MessageId{0, 7}));
  }
}

TEST(Broadcast, SenderInBsRangeReachesStation) {
  std::vector<VehicleState> s{vs("a", 0, 0, 0)};
  std::vector<BaseStation> bs{{"near", {0, 30}, 50}, {"far", {0, 300}, 50}};
  RadioParams p;
  Rng rng(3);
  auto out = broadcast({0, 0}, 0, sec(0), s, bs, p, rng);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].receiver.kind, Endpoint::Kind::station);
  EXPECT_EQ(out[0].receiver.index, 0u);
}

TEST(Broadcast, LossRateIsRoughlyHonoured) {
  std::vector<VehicleState> s{vs("a", 0, 0, 0), vs("b", 0, 10, 0)};
  RadioParams p;
  p.loss_prob = 0.3;
  Rng rng(99);
  int got = 0;
  for (int i = 0; i < 10000; ++i) got += static_cast<int>(broadcast({0, 0}, 0, sec(0), s, {}, p, rng).size());
  EXPECT_NEAR(got / 10000.0, 0.7, 0.03);
}

TEST(RadioParams, ValidationNamesTheField) {
  RadioParams p;
  p.hop_delay_max = sec(0.001);
  try {
    validate(p);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "radio.hop_delay_max");
  }
  p = {};
  p.loss_prob = 1.5;
  EXPECT_THROW(validate(p), ConfigError);
  p = {};
  p.range = 0;
  EXPECT_THROW(validate(p), ConfigError);
}
