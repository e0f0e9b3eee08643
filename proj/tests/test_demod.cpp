#include <cmath>

#include <gtest/gtest.h>

#include "fpp/demod.hpp"
#include "fpp/synth.hpp"

using namespace fpp;

namespace {

FringeStack single_pixel(double i0, double i1, double i2, double i3) {
  FringeStack s;
  s.frames = {Grid(1, 1, i0), Grid(1, 1, i1), Grid(1, 1, i2), Grid(1, 1, i3)};
  return s;
}

}  // namespace

TEST(FourStep, ZeroPhase) {
  const auto w = four_step_phase(single_pixel(228, 128, 28, 128));
  EXPECT_EQ(w.phase[0], 0.0);
  EXPECT_EQ(w.modulation[0], 100.0);
  EXPECT_TRUE(w.mask.valid(std::size_t{0}));
}

TEST(FourStep, QuarterPeriod) {
  const double a = 128, b = 100;
  const auto w = four_step_phase(single_pixel(a, a - b, a, a + b));
  EXPECT_EQ(w.phase[0], pi / 2.0);
}

TEST(FourStep, SynthesizedIntensities) {
  const double a = 120, b = 90, phi = 2.0;
  FringeStack s;
  for (int n = 0; n < 4; ++n) s.frames[n] = Grid(1, 1, a + b * std::cos(phi + n * pi / 2.0));
  const auto w = four_step_phase(s);
  EXPECT_NEAR(w.phase[0], 2.0, 1e-12);
  EXPECT_NEAR(w.modulation[0], 90.0, 1e-12);
}

TEST(FourStep, BoundaryPhaseIsPlusPi) {
  const auto w = four_step_phase(single_pixel(28, 128, 228, 128));
  EXPECT_EQ(w.phase[0], pi);
}

TEST(FourStep, MismatchedFrames) {
  FringeStack s;
  s.frames = {Grid(2, 2), Grid(2, 2), Grid(3, 2), Grid(2, 2)};
  EXPECT_THROW(four_step_phase(s), std::invalid_argument);
}

TEST(ValidityMask, Threshold) {
  Grid m(3, 1, std::vector<double>{0.0, 4.0, 6.0});
  const Mask zero = validity_mask(Grid(2, 1, 1.0), 0.0);
  EXPECT_EQ(zero.count(), 2u);
  const Mask five = validity_mask(m, 5.0);
  EXPECT_FALSE(five.valid(std::size_t{0}));
  EXPECT_FALSE(five.valid(std::size_t{1}));
  EXPECT_TRUE(five.valid(std::size_t{2}));
  EXPECT_THROW(validity_mask(m, -1.0), std::invalid_argument);
}

TEST(ValidityMask, NoiselessRenderFullyValid) {
  FringeParams p;
  const auto w = four_step_phase(render_fringes(Grid(120, 40, 0.4), p, Carrier::object), 10.0);
  EXPECT_EQ(w.mask.count(), w.mask.size());
  for (double m : w.modulation.values()) ASSERT_NEAR(m, 100.0, 1e-9);
}

TEST(FourStep, AffineIntensityInvariance) {
  FringeParams p;
  p.noise_sigma = 4.0;
  SceneSpec scene = SceneSpec::face_and_cup();
  scene.width = 96;
  scene.height = 64;
  const Grid dphi = phase_from_height(height_field(scene).height, DfpGeometry{});
  const auto stack = render_fringes(dphi, p, Carrier::object);
  const auto base = four_step_phase(stack);
  for (auto [gain, offset] : {std::pair{0.5, 3.0}, std::pair{2.7, -40.0}, std::pair{1.5, 20.0}}) {
    FringeStack t = stack;
    for (auto& f : t.frames) {
      for (auto& v : f.values()) v = gain * v + offset;
    }
    const auto w = four_step_phase(t);
    for (std::size_t i = 0; i < w.phase.size(); ++i) {
      ASSERT_LE(circular_distance(w.phase[i], base.phase[i]), 1e-12) << "gain " << gain;
    }
  }
}
