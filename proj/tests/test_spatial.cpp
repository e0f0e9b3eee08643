#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fpp/demod.hpp"
#include "fpp/spatial.hpp"
#include "fpp/synth.hpp"

using namespace fpp;

namespace {

WrappedPhaseMap wrapped_from(const Grid& truth, const Grid& quality) {
  Grid phase(truth.width(), truth.height(), 0.0, Unit::radians);
  for (std::size_t i = 0; i < truth.size(); ++i) phase[i] = wrap_to_principal(truth[i]);
  return {phase, quality, Mask(truth.width(), truth.height(), true)};
}

// Smooth random surface: sum of a few random cosines, scaled so neighbor
// differences stay below pi.
Grid random_smooth_phase(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Grid g(w, h, 0.0, Unit::radians);
  const double slope_x = (u(rng) - 0.5) * 1.2;
  const double slope_y = (u(rng) - 0.5) * 1.2;
  struct Wave { double kx, ky, amp, phase; };
  std::vector<Wave> waves;
  for (int n = 0; n < 3; ++n) waves.push_back({u(rng) * 0.2, u(rng) * 0.2, u(rng) * 5.0, u(rng) * two_pi});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = slope_x * x + slope_y * y;
      for (const auto& wv : waves) v += wv.amp * std::cos(wv.kx * x + wv.ky * y + wv.phase);
      g.at(x, y) = v;
    }
  }
  return g;
}

}  // namespace

TEST(Itoh, AlreadyContinuous) {
  const std::vector<double> in{0.1, 0.2, 0.3};
  EXPECT_EQ(itoh_unwrap_line(in), in);
  EXPECT_EQ(itoh_fringe_orders(in), (std::vector<int>{0, 0, 0}));
}

TEST(Itoh, NegativeJumpRaisesOrder) {
  const std::vector<double> in{10.0, 10.2, 4.3};
  const auto out = itoh_unwrap_line(in);
  EXPECT_EQ(out[0], 10.0);
  EXPECT_EQ(out[1], 10.2);
  EXPECT_NEAR(out[2], 10.583185307179587, 1e-12);
}

TEST(Itoh, PositiveJumpLowersOrder) {
  const std::vector<double> in{0.0, 6.5};
  const auto out = itoh_unwrap_line(in);
  EXPECT_EQ(out[0], 0.0);
  EXPECT_NEAR(out[1], 0.21681469282041377, 1e-12);
}

TEST(Itoh, ExactlyPiKeepsOrder) {
  EXPECT_EQ(order_step(pi), 0);
  EXPECT_EQ(order_step(-pi), 0);
  EXPECT_EQ(order_step(-pi - 1e-9), 1);
  EXPECT_EQ(order_step(pi + 1e-9), -1);
  EXPECT_EQ(order_step(-4.0 * pi), 2);  // beyond one period: lands back in [-pi, pi]
}

TEST(Itoh, EmptyRejected) {
  EXPECT_THROW(itoh_unwrap_line(std::vector<double>{}), std::invalid_argument);
}

TEST(Itoh, PropertiesOnRandomWrappedLines) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> step(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> truth{0.0};
    for (int i = 1; i < 300; ++i) truth.push_back(truth.back() + step(rng));
    std::vector<double> wrapped;
    for (double t : truth) wrapped.push_back(wrap_to_principal(t));
    const auto out = itoh_unwrap_line(wrapped);
    for (std::size_t i = 0; i < out.size(); ++i) {
      ASSERT_LE(std::abs(wrap_to_principal(out[i] - wrapped[i])), 1e-9);
      if (i > 0) ASSERT_LE(std::abs(out[i] - out[i - 1]), pi);
      // |true step| < pi, so Itoh recovers the truth up to the anchor's order.
      ASSERT_NEAR(out[i] - out[0], truth[i] - truth[0], 1e-9);
    }
  }
}

TEST(QualityGuided, ConstantMapUnchanged) {
  const Grid truth(20, 10, 1.25, Unit::radians);
  const auto w = wrapped_from(truth, Grid(20, 10, 1.0));
  const auto u = quality_guided_unwrap(w);
  EXPECT_EQ(u.phase, w.phase);
  EXPECT_EQ(u.provenance, Provenance::spatial_quality_guided);
}

TEST(QualityGuided, SingleRowMatchesItohExactly) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> step(-3.0, 3.0);
  std::uniform_real_distribution<double> q(0.0, 100.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 200);
    Grid truth(w, 1, 0.0, Unit::radians);
    Grid quality(w, 1, 0.0, Unit::intensity);
    double v = 0.0;
    for (int x = 0; x < w; ++x) {
      v += step(rng);
      truth.at(x, 0) = v;
      quality.at(x, 0) = q(rng);
    }
    const auto wrapped = wrapped_from(truth, quality);
    const int seed_x = static_cast<int>(rng() % w);
    const auto u = quality_guided_unwrap(wrapped, Pixel{seed_x, 0});

    const auto orders = itoh_fringe_orders(wrapped.phase.row(0));
    for (int x = 0; x < w; ++x) {
      const double expected = apply_order(wrapped.phase.at(x, 0), orders[x] - orders[seed_x]);
      ASSERT_EQ(u.phase.at(x, 0), expected) << "trial " << trial << " x " << x;
    }
    EXPECT_EQ(u.phase.at(seed_x, 0), wrapped.phase.at(seed_x, 0));
  }
}

TEST(QualityGuided, RecoversSmoothSurfaceUpToPiston) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const Grid truth = random_smooth_phase(64, 48, rng);
    Grid quality(64, 48, 0.0);
    std::uniform_real_distribution<double> q(1.0, 2.0);
    for (auto& v : quality.values()) v = q(rng);
    const auto u = quality_guided_unwrap(wrapped_from(truth, quality));
    const double piston = u.phase[0] - truth[0];
    EXPECT_NEAR(std::remainder(piston, two_pi), 0.0, 1e-9);
    for (std::size_t i = 0; i < truth.size(); ++i) ASSERT_NEAR(u.phase[i] - truth[i], piston, 1e-9);
  }
}

TEST(QualityGuided, OnlySeedComponentUnwrapped) {
  Grid truth(9, 3, 0.5, Unit::radians);
  auto w = wrapped_from(truth, Grid(9, 3, 1.0));
  for (int y = 0; y < 3; ++y) w.mask.set(w.mask.index(4, y), false);  // wall splits the map
  const auto u = quality_guided_unwrap(w, Pixel{1, 1});
  EXPECT_EQ(u.mask.count(), 12u);
  EXPECT_TRUE(u.mask.valid(0, 0));
  EXPECT_FALSE(u.mask.valid(5, 0));
  EXPECT_TRUE(std::isnan(u.phase.at(6, 2)));
}

TEST(QualityGuided, InvalidSeedRejected) {
  auto w = wrapped_from(Grid(4, 4, 0.0), Grid(4, 4, 1.0));
  w.mask.set(0, false);
  EXPECT_THROW(quality_guided_unwrap(w, Pixel{0, 0}), std::invalid_argument);
  EXPECT_THROW(quality_guided_unwrap(w, Pixel{7, 0}), std::invalid_argument);
}

TEST(QualityGuided, DefaultSeedIsBestModulationLowestIndex) {
  Grid quality(4, 2, 1.0);
  quality.at(2, 0) = 5.0;
  quality.at(1, 1) = 5.0;
  const auto w = wrapped_from(Grid(4, 2, 0.0), quality);
  EXPECT_EQ(default_seed(w), (Pixel{2, 0}));
}

TEST(QualityGuided, VisitsEveryConnectedPixelOnce) {
  std::mt19937_64 rng(41);
  const Grid truth = random_smooth_phase(40, 30, rng);
  auto w = wrapped_from(truth, Grid(40, 30, 1.0));
  for (std::size_t i = 0; i < w.mask.size(); ++i) {
    if (rng() % 10 == 0) w.mask.set(i, false);
  }
  w.mask.set(w.mask.index(20, 15), true);
  const auto u = quality_guided_unwrap(w, Pixel{20, 15});
  // Every settled pixel is valid input and congruent to it.
  for (std::size_t i = 0; i < u.mask.size(); ++i) {
    if (!u.mask.valid(i)) continue;
    ASSERT_TRUE(w.mask.valid(i));
    ASSERT_LE(std::abs(wrap_to_principal(u.phase[i] - w.phase[i])), 1e-9);
  }
}

TEST(ItohScan, MatchesQualityGuidedOnReferencePlane) {
  FringeParams p;
  p.period_px = 18.0;
  const auto w = four_step_phase(render_fringes(Grid(160, 100, 0.0), p, Carrier::reference));
  const auto a = itoh_unwrap(w);
  const auto b = quality_guided_unwrap(w);
  EXPECT_EQ(a.provenance, Provenance::spatial_itoh);
  const double piston = std::round((a.phase[0] - b.phase[0]) / two_pi) * two_pi;
  for (std::size_t i = 0; i < a.phase.size(); ++i) ASSERT_NEAR(a.phase[i] - piston, b.phase[i], 1e-9);
}

TEST(ItohScan, GapRestartsOrder) {
  // Row: 0, 3, [gap], 6.3 -> the pixel after the gap keeps its own value.
  Grid v(4, 1, std::vector<double>{0.0, 3.0, 100.0, 6.3});
  Mask m(4, 1, true);
  m.set(2, false);
  const auto orders = anchored_scan_orders(v, m, 0);
  EXPECT_EQ(orders[3], 0);
  EXPECT_THROW(anchored_scan_orders(v, m, 4), std::invalid_argument);
}
