#pragma once

// I/Q (nested Mach-Zehnder) modulator biased at null, and its single-sideband
// small-signal approximation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "mmfcomm/error.hpp"

namespace mmfcomm::modulation {

struct IqDrive {
  double v1 = 0.0;
  double v2 = 0.0;
  double v_pi = 1.0;
  std::complex<double> e_in{1.0, 0.0};
};

struct ToneCommand {
  double e0 = 1.0;
  double v0 = 0.0;
  double v_pi = 1.0;
  double f0_hz = 0.0;
  double fm_hz = 0.0;
};

struct Tone {
  double frequency_hz;
  double amplitude;
};

struct SpectralLine {
  double frequency_hz;
  std::complex<double> amplitude;  // complex Fourier coefficient of the output field
  double power_db;                 // relative to the strongest line
};

enum class Arms { kIq, kInPhaseOnly };

// E_out = E_in / 2 * [sin(pi V1 / Vpi) + i sin(pi V2 / Vpi)]
inline std::complex<double> iq_output(const IqDrive& d) {
  require(d.v_pi > 0.0, "v_pi must be > 0");
  const double i_arm = std::sin(std::numbers::pi * d.v1 / d.v_pi);
  const double q_arm = std::sin(std::numbers::pi * d.v2 / d.v_pi);
  return 0.5 * d.e_in * std::complex<double>(i_arm, q_arm);
}

// Linearised output: a tone at f0 + fm with amplitude pi V0 E0 / (2 Vpi).
inline Tone ssb_tone(const ToneCommand& c) {
  require(c.v_pi > 0.0, "v_pi must be > 0");
  require(c.v0 >= 0.0, "v0 must be >= 0");
  return {c.f0_hz + c.fm_hz, std::numbers::pi * c.v0 * c.e0 / (2.0 * c.v_pi)};
}

// Line spectrum of the exact modulator output for v1 = v0 cos(2 pi fm t),
// v2 = v0 sin(2 pi fm t) (or v2 = 0 with Arms::kInPhaseOnly), unit input field.
// Lines are reported at every harmonic k * fm below Nyquist, k from -K to K.
// The record must span an integer number of drive periods with an integer
// number of samples; no window is applied and lines sit on exact DFT bins.
inline std::vector<SpectralLine> ssb_spectrum(double v0, double v_pi, double fm_hz, double duration_s,
                                              double rate_hz, Arms arms = Arms::kIq) {
  require(v_pi > 0.0, "v_pi must be > 0");
  require(fm_hz > 0.0, "fm_hz must be > 0");
  require(rate_hz > 4.0 * fm_hz, "rate_hz must exceed 4 * fm_hz");
  const double periods = duration_s * fm_hz;
  const double samples = duration_s * rate_hz;
  if (periods < 1.0 - 1e-9 || std::abs(periods - std::round(periods)) > 1e-9 * std::max(1.0, periods)) {
    throw InvalidParameter("duration must be an integer number of drive periods");
  }
  if (std::abs(samples - std::round(samples)) > 1e-9 * std::max(1.0, samples)) {
    throw InvalidParameter("duration must hold an integer number of samples");
  }
  const auto n = static_cast<std::size_t>(std::llround(samples));
  const auto p = static_cast<long long>(std::llround(periods));

  std::vector<std::complex<double>> field(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(p) * static_cast<double>(i) /
                         static_cast<double>(n);
    IqDrive d{v0 * std::cos(phase), arms == Arms::kIq ? v0 * std::sin(phase) : 0.0, v_pi, {1.0, 0.0}};
    field[i] = iq_output(d);
  }

  // Harmonic k of the drive lives in DFT bin k * p.
  const long long k_max = static_cast<long long>((static_cast<double>(n) / 2.0 - 1.0) / static_cast<double>(p));
  std::vector<SpectralLine> lines;
  lines.reserve(static_cast<std::size_t>(2 * k_max + 1));
  double strongest = 0.0;
  for (long long k = -k_max; k <= k_max; ++k) {
    const double bin = static_cast<double>(k * p);
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const double a = -2.0 * std::numbers::pi * bin * static_cast<double>(i) / static_cast<double>(n);
      acc += field[i] * std::polar(1.0, a);
    }
    acc /= static_cast<double>(n);
    lines.push_back({static_cast<double>(k) * fm_hz, acc, 0.0});
    strongest = std::max(strongest, std::norm(acc));
  }
  for (auto& line : lines) {
    const double pw = std::norm(line.amplitude);
    line.power_db = (strongest > 0.0 && pw > 0.0) ? 10.0 * std::log10(pw / strongest)
                                                   : -std::numeric_limits<double>::infinity();
  }
  return lines;
}

inline const SpectralLine* line_at(const std::vector<SpectralLine>& lines, double frequency_hz) {
  for (const auto& line : lines) {
    if (std::abs(line.frequency_hz - frequency_hz) <= 1e-9 * std::max(1.0, std::abs(frequency_hz))) {
      return &line;
    }
  }
  return nullptr;
}

// Power of the +fm line over the strongest other line, in dB. For the I/Q
// drive the -fm line cancels exactly, so the strongest spur is the -3 fm
// third-order product.
inline double spur_suppression_db(const std::vector<SpectralLine>& lines, double fm_hz) {
  const SpectralLine* wanted = line_at(lines, fm_hz);
  if (wanted == nullptr) throw InvalidParameter("spectrum has no line at +fm");
  double spur = 0.0;
  for (const auto& line : lines) {
    if (&line != wanted) spur = std::max(spur, std::norm(line.amplitude));
  }
  if (spur <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(std::norm(wanted->amplitude) / spur);
}

}  // namespace mmfcomm::modulation
