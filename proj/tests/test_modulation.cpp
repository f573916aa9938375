#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "mmfcomm/modulation.hpp"
#include "mmfcomm/random.hpp"

using namespace mmfcomm;
using namespace mmfcomm::modulation;

namespace {

constexpr double kFm = 1e6;
constexpr double kRate = 32e6;
constexpr double kDuration = 4e-6;

std::vector<SpectralLine> spectrum(double ratio, Arms arms = Arms::kIq) {
  return ssb_spectrum(ratio * 2.0, 2.0, kFm, kDuration, kRate, arms);
}

// Jacobi-Anger: the I/Q output is sum over odd k of J_k(a) e^{i k phi} with
// alternating sign on the k = 3 mod 4 terms, which land at -k fm.
double bessel_line(int harmonic, double a) { return std::cyl_bessel_j(std::abs(harmonic), a); }

}  // namespace

TEST(IqOutput, NullBiasIsDark) {
  EXPECT_EQ(iq_output({0.0, 0.0, 3.0, {1.0, 0.0}}), std::complex<double>(0.0, 0.0));
}

TEST(IqOutput, HalfVpiOnOneArm) {
  const std::complex<double> e{0.8, -0.3};
  const auto i_only = iq_output({1.5, 0.0, 3.0, e});
  EXPECT_NEAR(std::abs(i_only - e / 2.0), 0.0, 1e-15);
  const auto q_only = iq_output({0.0, 1.5, 3.0, e});
  EXPECT_NEAR(std::abs(q_only - std::complex<double>(0.0, 1.0) * e / 2.0), 0.0, 1e-15);
}

TEST(IqOutput, RejectsNonPositiveVpi) {
  EXPECT_THROW(iq_output({0.1, 0.1, 0.0, {1.0, 0.0}}), InvalidParameter);
}

TEST(IqOutput, MagnitudeBoundProperty) {
  Rng rng(11);
  for (int i = 0; i < 10000; ++i) {
    const IqDrive d{rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(0.1, 5),
                    {rng.normal(), rng.normal()}};
    EXPECT_LE(std::abs(iq_output(d)), std::abs(d.e_in) * std::sqrt(2.0) / 2.0 * (1.0 + 1e-12));
  }
}

TEST(SsbTone, Examples) {
  EXPECT_EQ(ssb_tone({1.0, 0.0, 2.0, 5e6, 1e6}).amplitude, 0.0);
  EXPECT_EQ(ssb_tone({1.0, 0.3, 2.0, 5e6, 0.0}).frequency_hz, 5e6);
  const auto t = ssb_tone({1.0, 0.2, 2.0, 5e6, 1e6});
  EXPECT_NEAR(t.amplitude, 0.15708, 1e-5);
  EXPECT_EQ(t.frequency_hz, 6e6);
  EXPECT_THROW(ssb_tone({1.0, -0.1, 2.0, 0.0, 0.0}), InvalidParameter);
}

TEST(SsbSpectrum, StrongestLineIsUpperSideband) {
  const auto lines = spectrum(0.05);
  const auto* up = line_at(lines, kFm);
  ASSERT_NE(up, nullptr);
  EXPECT_EQ(up->power_db, 0.0);
  for (const auto& l : lines) EXPECT_LE(l.power_db, 0.0);
}

TEST(SsbSpectrum, ImageSuppressedThirtyDb) {
  const auto lines = spectrum(0.05);
  const auto* image = line_at(lines, -kFm);
  ASSERT_NE(image, nullptr);
  EXPECT_LE(image->power_db, -30.0);
}

TEST(SsbSpectrum, LinesMatchBesselOracle) {
  for (double ratio : {0.5, 0.2, 0.05}) {
    const double a = std::numbers::pi * ratio;
    const auto lines = spectrum(ratio);
    EXPECT_NEAR(std::abs(line_at(lines, kFm)->amplitude), bessel_line(1, a), 1e-12);
    EXPECT_NEAR(std::abs(line_at(lines, -3 * kFm)->amplitude), bessel_line(3, a), 1e-12);
    EXPECT_NEAR(std::abs(line_at(lines, 5 * kFm)->amplitude), bessel_line(5, a), 1e-12);
    EXPECT_NEAR(std::abs(line_at(lines, -kFm)->amplitude), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(line_at(lines, 0.0)->amplitude), 0.0, 1e-12);
  }
}

TEST(SsbSpectrum, SmallDriveMatchesLinearTone) {
  const double v_pi = 2.0, v0 = 0.01 * v_pi;
  const auto lines = ssb_spectrum(v0, v_pi, kFm, kDuration, kRate);
  const double expected = ssb_tone({1.0, v0, v_pi, 0.0, kFm}).amplitude;
  EXPECT_NEAR(std::abs(line_at(lines, kFm)->amplitude) / expected, 1.0, 0.01);
}

TEST(SsbSpectrum, InPhaseOnlyDriveIsSymmetric) {
  const auto lines = spectrum(0.1, Arms::kInPhaseOnly);
  const auto* up = line_at(lines, kFm);
  const auto* down = line_at(lines, -kFm);
  EXPECT_NEAR(std::norm(up->amplitude), std::norm(down->amplitude), 1e-15);
  EXPECT_NEAR(up->power_db, 0.0, 1e-9);
}

TEST(SsbSpectrum, SpurSuppressionGrowsAsDriveShrinks) {
  double last = -1e300;
  for (double ratio : {0.5, 0.2, 0.1, 0.05}) {
    const double s = spur_suppression_db(spectrum(ratio), kFm);
    EXPECT_GT(s, last) << ratio;
    last = s;
  }
}

TEST(SsbSpectrum, RejectsLeakyRecords) {
  EXPECT_THROW(ssb_spectrum(0.1, 2.0, kFm, 3.5e-6, kRate), InvalidParameter);
  EXPECT_THROW(ssb_spectrum(0.1, 2.0, kFm, kDuration, 3e6), InvalidParameter);
  EXPECT_THROW(ssb_spectrum(0.1, 2.0, kFm, 4e-6, 32.1e6), InvalidParameter);
  EXPECT_THROW(ssb_spectrum(0.1, 0.0, kFm, kDuration, kRate), InvalidParameter);
}
