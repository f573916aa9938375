#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mmfcomm/channel.hpp"
#include "mmfcomm/correlation.hpp"
#include "oracles.hpp"

using namespace mmfcomm;
using namespace mmfcomm::channel;

namespace {

double hand_delay_spread(double length, double n, double dn) {
  // (L/c)(dn/n), evaluated in a different order from the library
  return (length * dn) / (n * 299792458.0);
}

double mean_correlation(double df, int seeds, bool absolute) {
  const ReceiverSpec rx;
  double acc = 0.0;
  for (int s = 1; s <= seeds; ++s) {
    FiberSpec spec;
    spec.rng_seed = static_cast<std::uint64_t>(s);
    const auto ch = synthesize_channel(spec, 1);
    const double r = spectral_correlation(ch, 0, 0.0, df, rx).value();
    acc += absolute ? std::abs(r) : r;
  }
  return acc / seeds;
}

}  // namespace

TEST(DelaySpread, DefaultFixture) {
  const FiberSpec spec;
  EXPECT_NEAR(delay_spread(spec), 2.30e-9, 1e-12);
  EXPECT_NEAR(delay_spread(spec), hand_delay_spread(1000.0, 1.45, 0.001), 1e-21);
}

TEST(DelaySpread, LinearInLength) {
  FiberSpec a, b;
  b.length_m = 2.0 * a.length_m;
  EXPECT_NEAR(delay_spread(b), 2.0 * delay_spread(a), 1e-12 * delay_spread(b));
}

TEST(DelaySpread, VanishesWithIndexContrast) {
  FiberSpec spec;
  spec.delta_n = 1e-15;
  EXPECT_LT(delay_spread(spec), 1e-20);
  EXPECT_THROW((spec.delta_n = 0.0, spec.validate()), InvalidParameter);
}

TEST(Synthesize, DeterministicInSeed) {
  const FiberSpec spec;
  EXPECT_EQ(synthesize_channel(spec, 7), synthesize_channel(spec, 7));
  FiberSpec other = spec;
  other.rng_seed = 2;
  EXPECT_NE(synthesize_channel(spec, 7), synthesize_channel(other, 7));
}

TEST(Synthesize, DelaysAndPhasesInRange) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    FiberSpec spec;
    spec.rng_seed = seed;
    const auto ch = synthesize_channel(spec, 3);
    ASSERT_EQ(ch.mode_count(), spec.mode_count);
    for (double tau : ch.delays_s) {
      EXPECT_GE(tau, 0.0);
      EXPECT_LE(tau, delay_spread(spec));
    }
    for (double th : ch.spectral_phases_s) {
      EXPECT_GE(th, 0.0);
      EXPECT_LE(th, spec.theta_spread_s);
    }
  }
}

TEST(Synthesize, PerCorePowerIsUnity) {
  const auto ch = synthesize_channel(FiberSpec{}, 7);
  for (int k = 0; k < 7; ++k) {
    double p = 0.0;
    for (auto w : ch.core_weights(k)) p += std::norm(w);
    EXPECT_NEAR(p, 1.0, 1e-9) << "core " << k;
  }
}

TEST(Synthesize, RejectsBadArguments) {
  EXPECT_THROW(synthesize_channel(FiberSpec{}, 0), InvalidParameter);
  FiberSpec spec;
  spec.mode_count = 1;
  EXPECT_THROW(synthesize_channel(spec, 1), InvalidParameter);
  spec = {};
  spec.length_m = -1.0;
  EXPECT_THROW(synthesize_channel(spec, 1), InvalidParameter);
}

TEST(Propagate, ZeroLevelNoNoiseIsDark) {
  const auto ch = synthesize_channel(FiberSpec{}, 2);
  ReceiverSpec rx;
  rx.snr_db = std::numeric_limits<double>::infinity();
  const auto t = propagate(ch, 1, 1.2e6, 0.0, rx, 99);
  ASSERT_EQ(t.samples.size(), 200u);
  for (double s : t.samples) EXPECT_EQ(s, 0.0);
  EXPECT_EQ(t.core_index, 1);
  EXPECT_EQ(t.sample_rate_hz, rx.sample_rate_hz);
}

TEST(Propagate, LevelScalesExactly) {
  const auto ch = synthesize_channel(FiberSpec{}, 1);
  ReceiverSpec rx;
  rx.snr_db = std::numeric_limits<double>::infinity();
  const auto half = propagate(ch, 0, 3e5, 0.5, rx, 1);
  const auto full = propagate(ch, 0, 3e5, 1.0, rx, 1);
  for (std::size_t i = 0; i < full.samples.size(); ++i) EXPECT_EQ(half.samples[i], 0.5 * full.samples[i]);
}

TEST(Propagate, SameSeedSameTrace) {
  const auto ch = synthesize_channel(FiberSpec{}, 1);
  const ReceiverSpec rx;
  const auto a = propagate(ch, 0, 6e5, 0.75, rx, 42);
  const auto b = propagate(ch, 0, 6e5, 0.75, rx, 42);
  const auto c = propagate(ch, 0, 6e5, 0.75, rx, 43);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
}

TEST(Propagate, NoiseStdFollowsSnr) {
  const auto ch = synthesize_channel(FiberSpec{}, 1);
  ReceiverSpec rx;
  rx.snr_db = 10.0;
  const Propagator prop(ch, rx);
  const auto clean = prop.noiseless(0, 0.0);
  const double peak = *std::max_element(clean.samples.begin(), clean.samples.end());
  double ss = 0.0;
  std::size_t n = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto t = prop.transmit(0, 0.0, 1.0, seed);
    for (std::size_t i = 0; i < t.samples.size(); ++i) {
      const double e = t.samples[i] - clean.samples[i];
      ss += e * e;
      ++n;
    }
  }
  const double sigma = std::sqrt(ss / static_cast<double>(n));
  EXPECT_NEAR(sigma, peak / 10.0, 0.01 * peak / 10.0);
}

TEST(Propagate, MatchesDirectFieldSum) {
  // bin means of the oracle's pointwise intensity on the same fine grid
  const auto ch = synthesize_channel(FiberSpec{}, 2);
  ReceiverSpec rx;
  rx.snr_db = std::numeric_limits<double>::infinity();
  const double f = 1.7e6;
  const auto t = propagate(ch, 1, f, 1.0, rx, 0);
  const double fine_rate = rx.sample_rate_hz * rx.oversample;
  for (std::size_t b = 0; b < t.samples.size(); ++b) {
    double acc = 0.0;
    for (int j = 0; j < rx.oversample; ++j) {
      const double time = (static_cast<double>(b * rx.oversample + j) + 0.5) / fine_rate;
      acc += oracle::intensity_at(ch, 1, f, time, rx.pulse_width_s);
    }
    EXPECT_NEAR(t.samples[b], acc / rx.oversample, 1e-12) << "bin " << b;
  }
}

TEST(Propagate, RejectsBadCoreAndLevel) {
  const auto ch = synthesize_channel(FiberSpec{}, 2);
  const ReceiverSpec rx;
  EXPECT_THROW(propagate(ch, 2, 0.0, 1.0, rx, 0), InvalidParameter);
  EXPECT_THROW(propagate(ch, -1, 0.0, 1.0, rx, 0), InvalidParameter);
  EXPECT_THROW(propagate(ch, 0, 0.0, -0.1, rx, 0), InvalidParameter);
}

TEST(Propagate, RejectsOverlappingWindow) {
  FiberSpec spec;
  spec.delta_n = 0.01;  // 23 ns spread
  const auto ch = synthesize_channel(spec, 1);
  EXPECT_THROW(propagate(ch, 0, 0.0, 1.0, ReceiverSpec{}, 0), WindowError);
  ReceiverSpec rx;
  rx.symbol_period_s = 2.3e-9;  // shorter than spread + pulse
  EXPECT_THROW(propagate(synthesize_channel(FiberSpec{}, 1), 0, 0.0, 1.0, rx, 0), WindowError);
}

TEST(Propagate, EnergyIndependentOfFrequencyForDisjointPulses) {
  ReceiverSpec rx;
  rx.snr_db = std::numeric_limits<double>::infinity();
  const double sigma = rx.pulse_width_s / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double min_gap = 2.0 * 8.0 * sigma + 4.0 / (rx.sample_rate_hz * rx.oversample);
  // pick the first seed whose four sub-pulses are fully separated
  std::optional<ChannelInstance> ch;
  for (std::uint64_t seed = 1; seed < 1000 && !ch; ++seed) {
    FiberSpec spec;
    spec.mode_count = 4;
    spec.rng_seed = seed;
    auto c = synthesize_channel(spec, 1);
    auto d = c.delays_s;
    std::sort(d.begin(), d.end());
    bool ok = true;
    for (std::size_t i = 1; i < d.size(); ++i) ok = ok && d[i] - d[i - 1] > min_gap;
    if (ok) ch = c;
  }
  ASSERT_TRUE(ch.has_value());
  const Propagator prop(*ch, rx);
  const double e0 = prop.fine_energy(0, 0.0);
  ASSERT_GT(e0, 0.0);
  for (double f : {1e3, 2.5e5, 6e5, 3.3e6, 1e8}) EXPECT_NEAR(prop.fine_energy(0, f) / e0, 1.0, 1e-6) << f;
}

TEST(SpectralCorrelation, SelfIsOne) {
  const auto ch = synthesize_channel(FiberSpec{}, 1);
  EXPECT_NEAR(spectral_correlation(ch, 0, 4e5, 4e5, ReceiverSpec{}).value(), 1.0, 1e-12);
}

TEST(SpectralCorrelation, ConstantTraceIsFlagged) {
  EXPECT_FALSE(pearson(std::vector<double>{2, 2, 2}, std::vector<double>{1, 2, 3}).has_value());
  // a window made of a single lit bin pair is not constant, but an all-dark one is
  const std::vector<double> dark(10, 0.0), lit{0, 1, 0, 0, 0, 0, 0, 0, 0, 0};
  EXPECT_FALSE(pearson(dark, lit).has_value());
}

TEST(SpectralCorrelation, RejectsBadCore) {
  const auto ch = synthesize_channel(FiberSpec{}, 1);
  EXPECT_THROW(spectral_correlation(ch, 1, 0.0, 1.0, ReceiverSpec{}), InvalidParameter);
}

// Full-window Pearson on the default fixture stays well above 0.3 at large
// frequency separations: every trace shares the same dark region, which
// covers most of the 20 ns window. Kept as a literal check of the stated
// target; it is expected to fail.
TEST(SpectralCorrelation, DecorrelatedAtFiftyOverThetaSpread) {
  const double df = 50.0 / FiberSpec{}.theta_spread_s;
  const double m = mean_correlation(df, 100, true);
  RecordProperty("mean_abs_r", std::to_string(m));
  EXPECT_LT(m, 0.3);
}

TEST(SpectralCorrelation, CloserFrequenciesCorrelateMore) {
  EXPECT_GE(mean_correlation(600e3, 100, false), mean_correlation(1.2e6, 100, false));
}

TEST(SpectralCorrelation, MeanIsNonIncreasingInSeparation) {
  const std::vector<double> grid{50e3, 150e3, 300e3, 600e3, 1.2e6};
  std::vector<double> means;
  for (double df : grid) means.push_back(mean_correlation(df, 100, false));
  for (std::size_t i = 1; i < means.size(); ++i) EXPECT_LE(means[i], means[i - 1] + 0.02) << grid[i];
  EXPECT_LT(means.back(), means.front());
}
