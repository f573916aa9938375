#pragma once

// Parametric multimode-fiber channel.
//
// One launched pulse is split into M sub-pulses, one per guided mode, that
// arrive at delays tau_m spread over the intermodal delay spread. At a
// receiving core k the field is the coherent sum
//
//   e_k(t) = sum_m w_km * g(t - t0 - tau_m) * exp(i 2 pi f theta_m)
//
// where f is the commanded optical frequency offset from the carrier, theta_m
// is the mode's spectral phase sensitivity and w_km a complex coupling weight
// that folds in the mode's spatial profile at the core and its static phase.
// Interference between overlapping sub-pulses makes the detected intensity a
// frequency-dependent fingerprint.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmfcomm/correlation.hpp"
#include "mmfcomm/error.hpp"
#include "mmfcomm/random.hpp"

namespace mmfcomm::channel {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

struct FiberSpec {
  double length_m = 1000.0;
  double n_avg = 1.45;
  double delta_n = 0.001;
  int mode_count = 64;
  double theta_spread_s = 2e-6;
  std::uint64_t rng_seed = 1;

  void validate() const {
    require(std::isfinite(length_m) && length_m > 0.0, "fiber.length_m must be > 0");
    require(std::isfinite(n_avg) && n_avg > 1.0, "fiber.n_avg must be > 1");
    require(std::isfinite(delta_n) && delta_n > 0.0 && delta_n < n_avg,
            "fiber.delta_n must satisfy 0 < delta_n < n_avg");
    require(mode_count >= 2, "fiber.modes must be >= 2");
    require(std::isfinite(theta_spread_s) && theta_spread_s > 0.0, "fiber.theta_spread_s must be > 0");
  }

  bool operator==(const FiberSpec&) const = default;
};

struct ReceiverSpec {
  double sample_rate_hz = 10e9;
  double symbol_period_s = 20e-9;
  double pulse_width_s = 0.05e-9;
  double snr_db = 25.0;  // +inf disables noise
  int oversample = 16;

  void validate() const {
    require(std::isfinite(sample_rate_hz) && sample_rate_hz > 0.0, "rx.sample_rate_hz must be > 0");
    require(std::isfinite(symbol_period_s) && symbol_period_s > 0.0, "rx.symbol_period_s must be > 0");
    require(std::isfinite(pulse_width_s) && pulse_width_s > 0.0, "rx.pulse_width_s must be > 0");
    require(!std::isnan(snr_db), "rx.snr_db must not be NaN");
    require(oversample >= 4, "rx.oversample must be >= 4");
    require(trace_length() >= 2, "symbol window must hold at least two receiver samples");
  }

  // Receiver samples per symbol window.
  std::size_t trace_length() const {
    return static_cast<std::size_t>(std::floor(symbol_period_s * sample_rate_hz + 1e-9));
  }

  double window_s() const { return static_cast<double>(trace_length()) / sample_rate_hz; }

  bool operator==(const ReceiverSpec&) const = default;
};

struct ChannelInstance {
  FiberSpec spec;
  int core_count = 0;
  std::vector<double> delays_s;           // tau_m
  std::vector<double> spectral_phases_s;  // theta_m
  std::vector<std::complex<double>> coupling;  // K x M, row-major by core

  int mode_count() const { return static_cast<int>(delays_s.size()); }

  std::span<const std::complex<double>> core_weights(int core) const {
    const auto m = delays_s.size();
    return {coupling.data() + static_cast<std::size_t>(core) * m, m};
  }

  bool operator==(const ChannelInstance&) const = default;
};

struct IntensityTrace {
  std::vector<double> samples;
  double sample_rate_hz = 0.0;
  int core_index = 0;
};

// Maximum intermodal pulse broadening, (L / c) * (delta_n / n).
inline double delay_spread(const FiberSpec& spec) {
  return spec.length_m / kSpeedOfLight * (spec.delta_n / spec.n_avg);
}

inline ChannelInstance synthesize_channel(const FiberSpec& spec, int core_count) {
  spec.validate();
  require(core_count >= 1, "core_count must be >= 1");

  ChannelInstance ch;
  ch.spec = spec;
  ch.core_count = core_count;
  const auto m = static_cast<std::size_t>(spec.mode_count);
  const double spread = delay_spread(spec);

  Rng rng(spec.rng_seed);
  ch.delays_s.resize(m);
  for (auto& tau : ch.delays_s) tau = std::min(spread, rng.uniform(0.0, spread));
  ch.spectral_phases_s.resize(m);
  for (auto& theta : ch.spectral_phases_s) theta = rng.uniform(0.0, spec.theta_spread_s);

  ch.coupling.resize(static_cast<std::size_t>(core_count) * m);
  for (int k = 0; k < core_count; ++k) {
    auto* row = ch.coupling.data() + static_cast<std::size_t>(k) * m;
    double power = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double re = rng.normal();
      const double im = rng.normal();
      row[j] = {re, im};
      power += re * re + im * im;
    }
    const double scale = 1.0 / std::sqrt(power);
    for (std::size_t j = 0; j < m; ++j) row[j] *= scale;
  }
  return ch;
}

// Evaluates traces for one (channel, receiver) pair. Sub-pulse envelopes are
// sampled once on the fine grid and reused for every core and frequency.
//
// Envelope g is a unit-peak Gaussian with FWHM = pulse_width_s, truncated at
// +/- 8 sigma, launched at t0 = pulse_width_s / 2 so the earliest sub-pulse's
// half-maximum extent starts inside the window. Each receiver sample is the
// mean of the fine-grid intensity over its bin (integrate-and-dump).
class Propagator {
 public:
  static constexpr double kTruncationSigmas = 8.0;

  Propagator(const ChannelInstance& channel, const ReceiverSpec& rx) : channel_(&channel), rx_(rx) {
    rx.validate();
    require(channel.core_count >= 1 && channel.mode_count() >= 1, "channel instance is empty");
    const double spread = delay_spread(channel.spec);
    if (spread + rx.pulse_width_s > rx.window_s()) {
      throw WindowError("symbol window of " + std::to_string(rx.window_s()) +
                        " s cannot hold delay spread plus one pulse width (" +
                        std::to_string(spread + rx.pulse_width_s) + " s); pulses would overlap");
    }

    length_ = rx.trace_length();
    oversample_ = static_cast<std::size_t>(rx.oversample);
    const std::size_t fine_n = length_ * oversample_;
    const double fine_rate = rx.sample_rate_hz * static_cast<double>(oversample_);
    const double sigma = rx.pulse_width_s / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    const double half = kTruncationSigmas * sigma;
    const double t0 = 0.5 * rx.pulse_width_s;

    std::size_t fine_lo = fine_n, fine_hi = 0;
    envelopes_.reserve(static_cast<std::size_t>(channel.mode_count()));
    for (double tau : channel.delays_s) {
      const double centre = t0 + tau;
      // fine point j sits at (j + 0.5) / fine_rate
      const double j_first = std::ceil((centre - half) * fine_rate - 0.5);
      const double j_last = std::floor((centre + half) * fine_rate - 0.5);
      Envelope env;
      const auto first = static_cast<std::size_t>(std::max(0.0, j_first));
      const auto last = static_cast<std::size_t>(std::min(static_cast<double>(fine_n) - 1.0, j_last));
      env.first = first;
      if (j_last >= 0.0 && j_first < static_cast<double>(fine_n) && first <= last) {
        env.values.resize(last - first + 1);
        for (std::size_t j = first; j <= last; ++j) {
          const double dt = (static_cast<double>(j) + 0.5) / fine_rate - centre;
          env.values[j - first] = std::exp(-dt * dt / (2.0 * sigma * sigma));
        }
        fine_lo = std::min(fine_lo, first);
        fine_hi = std::max(fine_hi, last + 1);
      }
      envelopes_.push_back(std::move(env));
    }
    if (fine_hi == 0) fine_lo = 0;
    support_lo_ = fine_lo / oversample_;
    support_hi_ = std::max(support_lo_, (fine_hi + oversample_ - 1) / oversample_);
  }

  const ReceiverSpec& receiver() const { return rx_; }
  const ChannelInstance& channel() const { return *channel_; }
  std::size_t trace_length() const { return length_; }

  // Receiver samples [first, second) outside of which every noiseless trace is exactly zero.
  std::pair<std::size_t, std::size_t> support() const { return {support_lo_, support_hi_}; }

  IntensityTrace noiseless(int core, double freq_offset_hz, double intensity_level = 1.0) const {
    IntensityTrace trace = blank(core);
    std::vector<double> fine;
    unit_bins(core, freq_offset_hz, fine, trace.samples);
    if (intensity_level != 1.0) {
      for (double& s : trace.samples) s *= intensity_level;
    }
    return trace;
  }

  // Noiseless trace at intensity_level plus white Gaussian detector noise.
  // Noise std = (peak of the unit-level noiseless trace at this core and
  // frequency) / 10^(snr_db / 10); it does not scale with intensity_level.
  IntensityTrace transmit(int core, double freq_offset_hz, double intensity_level,
                          std::uint64_t noise_seed) const {
    require(intensity_level >= 0.0 && std::isfinite(intensity_level), "intensity_level must be >= 0");
    IntensityTrace trace = blank(core);
    std::vector<double> fine;
    unit_bins(core, freq_offset_hz, fine, trace.samples);
    double peak = 0.0;
    for (double s : trace.samples) peak = std::max(peak, s);
    if (intensity_level != 1.0) {
      for (double& s : trace.samples) s *= intensity_level;
    }
    if (std::isfinite(rx_.snr_db) && peak > 0.0) {
      const double sigma = peak / std::pow(10.0, rx_.snr_db / 10.0);
      Rng rng(noise_seed);
      for (double& s : trace.samples) s += sigma * rng.normal();
    }
    return trace;
  }

  // Sum of unit-level fine-grid intensity over the whole window.
  double fine_energy(int core, double freq_offset_hz) const {
    std::vector<double> fine;
    std::vector<double> bins(length_, 0.0);
    unit_bins(core, freq_offset_hz, fine, bins);
    double total = 0.0;
    for (double v : fine) total += v;
    return total;
  }

 private:
  struct Envelope {
    std::size_t first = 0;
    std::vector<double> values;
  };

  IntensityTrace blank(int core) const {
    if (core < 0 || core >= channel_->core_count) {
      throw InvalidParameter("core index " + std::to_string(core) + " out of range");
    }
    IntensityTrace trace;
    trace.samples.assign(length_, 0.0);
    trace.sample_rate_hz = rx_.sample_rate_hz;
    trace.core_index = core;
    return trace;
  }

  // Fills bins[support] with unit-level bin means; fine receives the fine-grid
  // intensity over the support bins.
  void unit_bins(int core, double freq_offset_hz, std::vector<double>& fine,
                 std::vector<double>& bins) const {
    const std::size_t fine_lo = support_lo_ * oversample_;
    const std::size_t fine_n = (support_hi_ - support_lo_) * oversample_;
    std::vector<double> re(fine_n, 0.0), im(fine_n, 0.0);

    const auto weights = channel_->core_weights(core);
    const double omega = 2.0 * std::numbers::pi * freq_offset_hz;
    for (std::size_t m = 0; m < envelopes_.size(); ++m) {
      const Envelope& env = envelopes_[m];
      if (env.values.empty()) continue;
      const std::complex<double> c = weights[m] * std::polar(1.0, omega * channel_->spectral_phases_s[m]);
      const double cr = c.real(), ci = c.imag();
      double* pr = re.data() + (env.first - fine_lo);
      double* pi = im.data() + (env.first - fine_lo);
      const double* g = env.values.data();
      const std::size_t n = env.values.size();
      for (std::size_t j = 0; j < n; ++j) {
        pr[j] += cr * g[j];
        pi[j] += ci * g[j];
      }
    }

    fine.resize(fine_n);
    for (std::size_t j = 0; j < fine_n; ++j) fine[j] = re[j] * re[j] + im[j] * im[j];
    const double inv = 1.0 / static_cast<double>(oversample_);
    for (std::size_t b = support_lo_; b < support_hi_; ++b) {
      const double* f = fine.data() + (b - support_lo_) * oversample_;
      double acc = 0.0;
      for (std::size_t j = 0; j < oversample_; ++j) acc += f[j];
      bins[b] = acc * inv;
    }
  }

  const ChannelInstance* channel_;
  ReceiverSpec rx_;
  std::size_t length_ = 0;
  std::size_t oversample_ = 0;
  std::size_t support_lo_ = 0;
  std::size_t support_hi_ = 0;
  std::vector<Envelope> envelopes_;
};

inline IntensityTrace propagate(const ChannelInstance& channel, int core, double freq_offset_hz,
                                double intensity_level, const ReceiverSpec& rx, std::uint64_t noise_seed) {
  return Propagator(channel, rx).transmit(core, freq_offset_hz, intensity_level, noise_seed);
}

// Pearson correlation between the noiseless traces at two frequencies.
// nullopt signals that one of the traces is constant.
inline std::optional<double> spectral_correlation(const ChannelInstance& channel, int core, double f1_hz,
                                                  double f2_hz, const ReceiverSpec& rx) {
  const Propagator prop(channel, rx);
  const auto a = prop.noiseless(core, f1_hz);
  const auto b = prop.noiseless(core, f2_hz);
  return pearson(a.samples, b.samples);
}

}  // namespace mmfcomm::channel
