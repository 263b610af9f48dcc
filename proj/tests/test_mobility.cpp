#include <gtest/gtest.h>

#include <sstream>

#include "test_support.hpp"

using namespace minuet;
using testing_support::sec;

namespace {

constexpr const char* kGapFcd = R"(<fcd-export>
<timestep time="5"><vehicle id="a" x="0" y="0" speed="1" angle="90"/></timestep>
<timestep time="6"><vehicle id="a" x="1" y="0" speed="1" angle="90"/></timestep>
<timestep time="7"><vehicle id="a" x="2" y="0" speed="1" angle="90"/></timestep>
<timestep time="8"><vehicle id="a" x="3" y="0" speed="1" angle="90"/></timestep>
<timestep time="12"><vehicle id="a" x="7" y="0" speed="1" angle="90"/></timestep>
<timestep time="13"><vehicle id="a" x="8" y="0" speed="1" angle="90"/></timestep>
</fcd-export>
)";

constexpr const char* kGapCsv = R"(t,vehicle_id,x,y,speed,heading
12,a,7,0,1,90
5,a,0,0,1,90
6,a,1,0,1,90
7,a,2,0,1,90
8,a,3,0,1,90
13,a,8,0,1,90
)";

}  // namespace

TEST(FcdTrace, OneTimestepOneVehicle) {
  auto t = parse_fcd_trace(R"(<fcd-export><timestep time="0.5"><vehicle id="v" x="1" y="2" speed="3" angle="45" lane="x"/></timestep></fcd-export>)");
  ASSERT_EQ(t.sample_count(), 1u);
  auto s = t.samples().front();
  EXPECT_EQ(s.vehicle_id, "v");
  EXPECT_EQ(s.t, sec(0.5));
  EXPECT_EQ(s.pos, (Vec2{1, 2}));
  EXPECT_EQ(s.speed, 3.0);
  EXPECT_EQ(s.heading, 45.0);
}

TEST(FcdTrace, DisappearanceSplitsPresenceIntervals) {
  auto t = parse_fcd_trace(kGapFcd);
  auto ivs = t.intervals("a");
  ASSERT_EQ(ivs.size(), 2u);
  EXPECT_EQ(ivs[0].begin(), sec(5));
  EXPECT_EQ(ivs[0].end(), sec(8));
  EXPECT_EQ(ivs[1].begin(), sec(12));
  EXPECT_EQ(ivs[1].end(), sec(13));
}

TEST(FcdTrace, EmptyTimestepListIsAnError) {
  try {
    parse_fcd_trace("<fcd-export></fcd-export>");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("empty trace"), std::string::npos);
  }
}

TEST(FcdTrace, MissingAttributeNamesItAndTheLine) {
  try {
    parse_fcd_trace("<fcd-export>\n<timestep time=\"0\">\n<vehicle id=\"a\" x=\"1\" speed=\"0\" angle=\"0\"/>\n</timestep></fcd-export>");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos);
  }
}

TEST(FcdTrace, MalformedXmlReportsLine) {
  try {
    parse_fcd_trace("<fcd-export>\n<timestep time=\"0\">\n<vehicle id=\"a\"\n</fcd-export>");
    FAIL();
  } catch (const SchemaError&) {
    FAIL() << "expected a syntax error, not a schema error";
  } catch (const ParseError& e) {
    EXPECT_GT(e.line(), 0u);
  }
}

TEST(CsvTrace, ThreeRowsOneVehicle) {
  auto t = parse_csv_trace("t,vehicle_id,x,y,speed,heading\n0,a,0,0,1,0\n1,a,1,0,1,0\n2,a,2,0,1,0\n");
  EXPECT_EQ(t.sample_count(), 3u);
  EXPECT_EQ(t.vehicles(), std::vector<VehicleId>{"a"});
  EXPECT_EQ(t.native_step(), sec(1));
}

TEST(CsvTrace, SameContentAsFcdGivesEqualTrace) { EXPECT_EQ(parse_csv_trace(kGapCsv), parse_fcd_trace(kGapFcd)); }

TEST(CsvTrace, DuplicateTimestampIsAnError) {
  try {
    parse_csv_trace("t,vehicle_id,x,y,speed,heading\n0,a,0,0,1,0\n0,a,1,0,1,0\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(CsvTrace, RowLevelErrors) {
  EXPECT_THROW(parse_csv_trace("t,id,x\n"), ParseError);
  EXPECT_THROW(parse_csv_trace("t,vehicle_id,x,y,speed,heading\n0,a,zero,0,1,0\n"), ParseError);
  EXPECT_THROW(parse_csv_trace("t,vehicle_id,x,y,speed,heading\n0,a,nan,0,1,0\n"), ParseError);
  EXPECT_THROW(parse_csv_trace("t,vehicle_id,x,y,speed,heading\n-1,a,0,0,1,0\n"), ParseError);
  EXPECT_THROW(parse_csv_trace("t,vehicle_id,x,y,speed,heading\n0,a,0,0,-1,0\n"), ParseError);
  EXPECT_THROW(parse_csv_trace("t,vehicle_id,x,y,speed,heading\n0,a,0,0,1\n"), ParseError);
  EXPECT_TRUE(parse_csv_trace("t,vehicle_id,x,y,speed,heading\n").empty());
}

TEST(PositionAt, ExactSampleMidpointAndGap) {
  auto t = parse_csv_trace(kGapCsv);
  auto exact = t.position_at("a", sec(6));
  ASSERT_TRUE(exact);
  EXPECT_EQ(exact->pos, (Vec2{1, 0}));
  auto t2 = parse_csv_trace("t,vehicle_id,x,y,speed,heading\n0,b,0,0,10,90\n1,b,10,0,10,90\n");
  auto mid = t2.position_at("b", sec(0.5));
  ASSERT_TRUE(mid);
  EXPECT_EQ(mid->pos, (Vec2{5, 0}));
  EXPECT_EQ(mid->t, sec(0.5));
  EXPECT_FALSE(t.position_at("a", sec(10)));
  EXPECT_FALSE(t.position_at("a", sec(4.9)));
  EXPECT_FALSE(t.position_at("nobody", sec(6)));
}

TEST(SynthTrace, ZeroVehiclesIsEmpty) {
  SynthParams p;
  p.n_vehicles = 0;
  auto t = synth_trace(p, 1);
  EXPECT_TRUE(t.empty());
  EXPECT_EQ(t.sample_count(), 0u);
}

TEST(SynthTrace, OneWayHeadingsAllEqual) {
  SynthParams p;
  p.n_vehicles = 10;
  p.lanes = LaneKind::one_way;
  auto t = synth_trace(p, 3);
  EXPECT_EQ(t.vehicles().size(), 10u);
  for (const auto& s : t.samples()) EXPECT_EQ(s.heading, 90.0);
}

TEST(SynthTrace, TwoWayUsesBothDirections) {
  SynthParams p;
  p.n_vehicles = 4;
  p.lanes = LaneKind::two_way;
  std::set<double> headings;
  for (const auto& s : synth_trace(p, 3).samples()) headings.insert(s.heading);
  EXPECT_EQ(headings, (std::set<double>{90.0, 270.0}));
}

TEST(SynthTrace, DensityMatchesVehiclesPerKilometre) {
  SynthParams p;
  p.n_vehicles = 16;
  p.length_m = 1000;
  auto t = synth_trace(p, 11);
  // every sample time sees all vehicles except those re-entering this step
  std::map<SimTime, int> per_t;
  for (const auto& s : t.samples()) {
    ++per_t[s.t];
    EXPECT_GE(s.pos.x, 0.0);
    EXPECT_LT(s.pos.x, 1000.0);
  }
  double mean = 0;
  for (const auto& [_, n] : per_t) mean += n;
  mean /= static_cast<double>(per_t.size());
  EXPECT_GT(mean, 14.5);
  EXPECT_LE(mean, 16.0);
}

TEST(SynthTrace, SameSeedSameTraceOtherSeedDiffers) {
  SynthParams p;
  p.n_vehicles = 8;
  EXPECT_EQ(synth_trace(p, 5), synth_trace(p, 5));
  EXPECT_NE(synth_trace(p, 5), synth_trace(p, 6));
}

TEST(SynthTrace, ContradictoryParamsRejected) {
  SynthParams p;
  p.speed_min = 20;
  p.speed_max = 10;
  EXPECT_THROW(synth_trace(p, 1), ConfigError);
  p = {};
  p.n_vehicles = -1;
  EXPECT_THROW(synth_trace(p, 1), ConfigError);
}

TEST(SynthTrace, CsvRoundTripIsLosslessAcrossSeeds) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthParams p;
    p.n_vehicles = 5 + static_cast<int>(seed);
    p.lanes = seed % 2 ? LaneKind::one_way : LaneKind::two_way;
    p.duration = sec(30);
    p.step = sec(0.5);
    auto t = synth_trace(p, seed);
    std::ostringstream out;
    write_csv_trace(out, t);
    EXPECT_EQ(parse_csv_trace(out.str()), t) << "seed " << seed;
  }
}

TEST(SynthTrace, RingExitLeavesOneSampleGap) {
  SynthParams p;
  p.n_vehicles = 1;
  p.length_m = 100;
  p.speed_min = p.speed_max = 10;
  p.duration = sec(30);
  auto t = synth_trace(p, 2);
  EXPECT_GE(t.intervals(t.vehicles().front()).size(), 2u);
}
