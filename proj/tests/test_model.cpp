#include <gtest/gtest.h>

#include <set>

#include "test_support.hpp"

using namespace minuet;
using testing_support::sec;
using testing_support::vs;

TEST(Distance, IdentityIsZero) { EXPECT_EQ(distance({0, 0}, {0, 0}), 0.0); }

TEST(Distance, PythagoreanTriple) { EXPECT_EQ(distance({0, 0}, {3, 4}), 5.0); }

TEST(Distance, TransmissionRangeApart) { EXPECT_EQ(distance({10, 10}, {110, 10}), 100.0); }

TEST(EventInRange, CoLocatedActiveEvent) {
  auto ev = testing_support::event("e", 50, 50, 0, 10, 20, 1);
  EXPECT_TRUE(event_in_range(vs("a", 5, 50, 50), ev));
}

TEST(EventInRange, BoundaryIsInclusive) {
  auto ev = testing_support::event("e", 0, 0, 0, 10, 20, 1);
  EXPECT_TRUE(event_in_range(vs("a", 1, 20, 0), ev));
  EXPECT_FALSE(event_in_range(vs("a", 1, 20.000001, 0), ev));
}

TEST(EventInRange, ExpiredOrNotYetSpawned) {
  auto ev = testing_support::event("e", 0, 0, 2, 3, 20, 1);
  EXPECT_FALSE(event_in_range(vs("a", 5, 0, 0), ev));  // t_spawn + lifetime is excluded
  EXPECT_FALSE(event_in_range(vs("a", 1.999999, 0, 0), ev));
  EXPECT_TRUE(event_in_range(vs("a", 2, 0, 0), ev));
  EXPECT_TRUE(event_in_range(vs("a", 4.999999, 0, 0), ev));
}

TEST(AzAdmits, ZeroElapsed) { EXPECT_TRUE(az_admits(sec(3), sec(3), sec(0.1))); }

TEST(AzAdmits, ExactlyMdtIsInside) { EXPECT_TRUE(az_admits(sec(3.1), sec(3), sec(0.1))); }

TEST(AzAdmits, OneMicrosecondLateIsOutside) {
  EXPECT_FALSE(az_admits(sec(3.1) + SimTime::micros(1), sec(3), sec(0.1)));
}

TEST(AzAdmits, ReceptionBeforeDetectionIsALogicError) {
  EXPECT_THROW(az_admits(sec(1), sec(2), sec(1)), std::logic_error);
}

TEST(InBsRange, CoLocatedBoundaryBeyond) {
  BaseStation bs{"b", {0, 0}, 100};
  EXPECT_TRUE(in_bs_range(vs("a", 0, 0, 0), bs));
  EXPECT_TRUE(in_bs_range(vs("a", 0, 60, 80), bs));
  EXPECT_FALSE(in_bs_range(vs("a", 0, 100.01, 0), bs));
}

TEST(SimTime, RoundsToMicroseconds) {
  EXPECT_EQ(sec(0.1).us(), 100000);
  EXPECT_EQ(sec(0.0000004).us(), 0);
  EXPECT_EQ(sec(0.0000006).us(), 1);
  EXPECT_EQ((sec(0.1) * 3).us(), sec(0.3).us());
  EXPECT_THROW(SimTime::seconds(std::nan("")), std::invalid_argument);
}

TEST(SimTime, FormatsSixDecimals) {
  EXPECT_EQ(format_seconds(sec(12.034)), "12.034000");
  EXPECT_EQ(format_seconds(SimTime::micros(-1500)), "-0.001500");
  EXPECT_EQ(format_seconds(SimTime{}), "0.000000");
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, DerivedStreamsAreStableAndDistinct) {
  auto a = Rng::derive({1, 2, 3});
  auto b = Rng::derive({1, 2, 3});
  auto c = Rng::derive({1, 2, 4});
  auto x = a.next();
  EXPECT_EQ(x, b.next());
  EXPECT_NE(x, c.next());
}

TEST(Rng, UniformIntCoversClosedRange) {
  Rng r(5);
  std::set<std::int64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    auto v = r.uniform_int(-2, 2);
    ASSERT_GE(v, -2);
    ASSERT_LE(v, 2);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 5u);
  EXPECT_EQ(r.uniform_int(7, 7), 7);
}

TEST(Rng, Uniform01InHalfOpenUnitInterval) {
  Rng r(9);
  for (int i = 0; i < 10000; ++i) {
    double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}
