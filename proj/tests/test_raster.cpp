#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "fpp/raster.hpp"

using namespace fpp;

TEST(Raster, RowMajorLayout) {
  Grid g(3, 2, 0.0, Unit::radians);
  g.at(2, 1) = 7.0;
  EXPECT_EQ(g.index(2, 1), 5u);
  EXPECT_EQ(g[5], 7.0);
  EXPECT_EQ(g.pixel(5), (Pixel{2, 1}));
  EXPECT_EQ(g.unit(), Unit::radians);
  EXPECT_EQ(g.row(1).size(), 3u);
}

TEST(Raster, RejectsBadDimensions) {
  EXPECT_THROW(Grid(0, 3), std::invalid_argument);
  EXPECT_THROW(Grid(2, -1), std::invalid_argument);
  EXPECT_THROW(Grid(2, 2, std::vector<double>(3)), std::invalid_argument);
}

TEST(Mask, IntersectAndCount) {
  Mask a(2, 2, true);
  Mask b(2, 2, true);
  b.set(3, false);
  const Mask c = intersect(a, b);
  EXPECT_EQ(c.count(), 3u);
  EXPECT_FALSE(c.valid(1, 1));
  EXPECT_FALSE(c.valid(5, 0));  // out of bounds reads as invalid
  EXPECT_THROW(intersect(a, Mask(3, 2)), std::invalid_argument);
}

TEST(WrapToPrincipal, Examples) {
  EXPECT_EQ(wrap_to_principal(0.0), 0.0);
  EXPECT_NEAR(wrap_to_principal(3.0 * pi), pi, 1e-12);
  EXPECT_NEAR(wrap_to_principal(-7.0), -0.7168146928204138, 1e-12);
  EXPECT_EQ(wrap_to_principal(pi), pi);
  EXPECT_EQ(wrap_to_principal(-pi), pi);  // boundary belongs to +pi
}

TEST(WrapToPrincipal, RejectsNonFinite) {
  EXPECT_THROW(wrap_to_principal(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  EXPECT_THROW(wrap_to_principal(std::numeric_limits<double>::infinity()), std::domain_error);
}

TEST(WrapToPrincipal, RangeAndPeriodicity) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> theta(-100.0, 100.0);
  std::uniform_int_distribution<int> period(-1'000'000, 1'000'000);
  for (int trial = 0; trial < 100'000; ++trial) {
    const double t = theta(rng);
    const int k = period(rng);
    const double a = wrap_to_principal(t);
    const double b = wrap_to_principal(t + two_pi * k);
    ASSERT_GT(a, -pi);
    ASSERT_LE(a, pi);
    ASSERT_GT(b, -pi);
    ASSERT_LE(b, pi);
    // Compared on the circle so a +pi / -pi boundary flip does not count.
    ASSERT_LE(std::abs(wrap_to_principal(a - b)), 1e-9) << "theta=" << t << " k=" << k;
  }
}
