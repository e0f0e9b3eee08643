#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fpp/demod.hpp"
#include "fpp/spatial.hpp"
#include "fpp/synth.hpp"

using namespace fpp;

TEST(HeightField, FlatPlaneIsZero) {
  SceneSpec s;
  s.kind = SceneKind::flat_plane;
  const auto hf = height_field(s);
  EXPECT_EQ(hf.height.width(), 624);
  EXPECT_EQ(hf.height.height(), 441);
  EXPECT_TRUE(std::all_of(hf.height.values().begin(), hf.height.values().end(), [](double v) { return v == 0.0; }));
  EXPECT_EQ(hf.mask.count(), hf.mask.size());
}

TEST(HeightField, GaussianPeakMaximumAtCenter) {
  SceneSpec s;
  s.kind = SceneKind::gaussian_peaks;
  s.peaks = {{312.0, 220.0, 10.0, 30.0}};
  const auto hf = height_field(s);
  const auto max_it = std::max_element(hf.height.values().begin(), hf.height.values().end());
  EXPECT_EQ(*max_it, 10.0);
  EXPECT_EQ(hf.height.at(312, 220), 10.0);
}

TEST(HeightField, HolesExactlyWhereInsideRadius) {
  SceneSpec s;
  s.kind = SceneKind::plate_with_holes;
  s.width = 200;
  s.height = 200;
  s.plate_height_mm = 5.0;
  s.holes = {{100.0, 100.0, 20.0}};
  const auto hf = height_field(s);
  for (int y = 0; y < s.height; ++y) {
    for (int x = 0; x < s.width; ++x) {
      const bool inside = (x - 100) * (x - 100) + (y - 100) * (y - 100) <= 400;
      ASSERT_EQ(hf.mask.valid(x, y), !inside) << x << "," << y;
      ASSERT_EQ(std::isnan(hf.height.at(x, y)), inside);
    }
  }
}

TEST(HeightField, RejectsInvalidScenes) {
  SceneSpec s;
  s.width = 0;
  EXPECT_THROW(height_field(s), std::invalid_argument);
  SceneSpec neg;
  neg.peaks = {{1.0, 1.0, -2.0, 3.0}};
  EXPECT_THROW(height_field(neg), std::invalid_argument);
}

TEST(PhaseFromHeight, Examples) {
  const DfpGeometry geom{700.0, 300.0, 0.05};
  Grid h(3, 1, std::vector<double>{0.0, 10.0, 20.0}, Unit::millimeters);
  const Grid dphi = phase_from_height(h, geom);
  EXPECT_EQ(dphi[0], 0.0);
  EXPECT_NEAR(dphi[1], 1.3659098493868667, 1e-12);

  const Grid doubled = phase_from_height(h, DfpGeometry{700.0, 600.0, 0.05});
  EXPECT_NEAR(doubled[1], 2.0 * dphi[1], 1e-12);
  EXPECT_NEAR(doubled[2], 2.0 * dphi[2], 1e-12);
}

TEST(PhaseFromHeight, StrictlyIncreasing) {
  const DfpGeometry geom;
  Grid h(1000, 1, 0.0, Unit::millimeters);
  for (int x = 0; x < 1000; ++x) h.at(x, 0) = x * 0.699;  // up to 698.3 mm < L
  const Grid dphi = phase_from_height(h, geom);
  EXPECT_EQ(dphi[0], 0.0);
  for (int x = 1; x < 1000; ++x) ASSERT_GT(dphi.at(x, 0), dphi.at(x - 1, 0));
}

TEST(PhaseFromHeight, RejectsHeightAtStandoff) {
  Grid h(1, 1, 700.0);
  EXPECT_THROW(phase_from_height(h, DfpGeometry{}), std::domain_error);
}

TEST(Render, ZeroPhaseIntensities) {
  FringeParams p;
  p.mean_intensity = 128.0;
  p.modulation = 100.0;
  const auto stack = render_fringes(Grid(4, 1, 0.0), p, Carrier::reference);
  EXPECT_NEAR(stack.frames[0][0], 228.0, 1e-12);
  EXPECT_NEAR(stack.frames[1][0], 128.0, 1e-12);
  EXPECT_NEAR(stack.frames[2][0], 28.0, 1e-12);
  EXPECT_NEAR(stack.frames[3][0], 128.0, 1e-12);
}

TEST(Render, SeedDeterminism) {
  FringeParams p;
  p.noise_sigma = 3.0;
  p.rng_seed = 99;
  const Grid dphi(64, 32, 0.7);
  const auto a = render_fringes(dphi, p, Carrier::object);
  const auto b = render_fringes(dphi, p, Carrier::object);
  for (int n = 0; n < 4; ++n) EXPECT_EQ(a.frames[n], b.frames[n]);
  p.rng_seed = 100;
  const auto c = render_fringes(dphi, p, Carrier::object);
  EXPECT_NE(a.frames[0], c.frames[0]);
}

TEST(Render, EightBitQuantization) {
  FringeParams p;
  p.quantize = Quantization::eight_bit;
  p.noise_sigma = 2.0;
  const auto stack = render_fringes(Grid(50, 10, 0.3), p, Carrier::object);
  for (const auto& f : stack.frames) {
    for (double v : f.values()) {
      ASSERT_EQ(v, std::round(v));
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 255.0);
    }
  }
  FringeParams bright = p;
  bright.mean_intensity = 200.0;
  EXPECT_THROW(render_fringes(Grid(2, 2), bright, Carrier::object), std::invalid_argument);
}

TEST(Render, NoSurfaceRendersAmbient) {
  Grid dphi(3, 1, 0.0);
  dphi[1] = std::numeric_limits<double>::quiet_NaN();
  const auto stack = render_fringes(dphi, FringeParams{}, Carrier::object);
  for (const auto& f : stack.frames) EXPECT_EQ(f[1], 128.0);
}

TEST(Render, NoiselessDemodRecoversWrappedPhase) {
  FringeParams p;
  p.period_px = 18.0;
  SceneSpec s = SceneSpec::face_and_cup();
  s.width = 160;
  s.height = 90;
  const Grid dphi = phase_from_height(height_field(s).height, DfpGeometry{});
  const auto w = four_step_phase(render_fringes(dphi, p, Carrier::object));
  const Grid truth = object_phase(dphi, p.period_px);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ASSERT_LE(circular_distance(w.phase[i], wrap_to_principal(truth[i])), 1e-9);
  }
}

TEST(Render, ReferenceCarrierIsLinear) {
  FringeParams p;
  p.period_px = 18.0;
  const auto w = four_step_phase(render_fringes(Grid(200, 3, 0.0), p, Carrier::reference));
  for (int y = 0; y < 3; ++y) {
    const auto row = itoh_unwrap_line(w.phase.row(y));
    for (std::size_t x = 1; x < row.size(); ++x) ASSERT_NEAR(row[x] - row[x - 1], two_pi / 18.0, 1e-9);
  }
}
