#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmfcomm/channel.hpp"
#include "mmfcomm/correlation.hpp"
#include "mmfcomm/error.hpp"

namespace mmfcomm::codec {

using channel::ChannelInstance;
using channel::FiberSpec;
using channel::IntensityTrace;
using channel::ReceiverSpec;

struct FrequencyAlphabet {
  double start_offset_hz = 0.0;
  double spacing_hz = 600e3;
  int size = 128;

  void validate() const {
    require(std::isfinite(start_offset_hz), "alphabet.start_offset_hz must be finite");
    require(std::isfinite(spacing_hz) && spacing_hz > 0.0, "alphabet.spacing_hz must be > 0");
    require(size >= 2, "alphabet.size must be >= 2");
  }

  double frequency(int index) const {
    if (index < 0 || index >= size) throw InvalidParameter("symbol index out of range");
    return start_offset_hz + static_cast<double>(index) * spacing_hz;
  }

  bool operator==(const FrequencyAlphabet&) const = default;
};

struct PamScheme {
  std::vector<double> levels{0.25, 0.5, 0.75, 1.0};

  void validate() const {
    require(!levels.empty(), "pam.levels must not be empty");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      require(levels[i] > 0.0 && levels[i] <= 1.0, "pam.levels must lie in (0, 1]");
      if (i > 0) require(levels[i] > levels[i - 1], "pam.levels must be strictly increasing");
    }
    require(levels.back() == 1.0, "pam.levels must end at 1");
  }

  int top() const { return static_cast<int>(levels.size()) - 1; }

  // Nearest level to an estimated scale; ties go to the lower level.
  int nearest(double scale) const {
    int best = 0;
    double best_d = std::abs(scale - levels[0]);
    for (std::size_t i = 1; i < levels.size(); ++i) {
      const double d = std::abs(scale - levels[i]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }

  bool operator==(const PamScheme&) const = default;
};

struct Symbol {
  int symbol_index = 0;
  int level_index = 0;
  bool operator==(const Symbol&) const = default;
};
using SymbolStream = std::vector<Symbol>;

struct Decision {
  int symbol_index = 0;
  double score = 0.0;
};

// Reference traces for every (core, symbol) plus precomputed correlation
// templates.
//
// Every fingerprint of a core is exactly zero outside a common support range
// (the sub-pulse envelopes are truncated). With fhat = (f - mean f) / |f - mean f|,
// fhat equals a constant c_f outside the support, so
//
//   sum_i (x_i - mean x) fhat_i = sum_{i in support} x_i (fhat_i - c_f) + c_f sum_i x_i
//
// and a full-window Pearson score costs only the support length per symbol.
class FingerprintBank {
 public:
  FingerprintBank(FiberSpec fiber, int core_count, FrequencyAlphabet alphabet, ReceiverSpec rx,
                  std::vector<double> traces)
      : fiber_(fiber), core_count_(core_count), alphabet_(alphabet), rx_(rx), traces_(std::move(traces)) {
    alphabet_.validate();
    rx_.validate();
    require(core_count_ >= 1, "core_count must be >= 1");
    length_ = rx_.trace_length();
    if (traces_.size() != static_cast<std::size_t>(core_count_) * static_cast<std::size_t>(alphabet_.size) * length_) {
      throw GeometryError("fingerprint bank: trace data does not match S x K x trace_length");
    }
    for (double v : traces_) {
      if (!std::isfinite(v)) throw GeometryError("fingerprint bank: non-finite sample");
    }
    prepare_templates();
  }

  static FingerprintBank build(const ChannelInstance& channel, const FrequencyAlphabet& alphabet,
                               const ReceiverSpec& rx) {
    alphabet.validate();
    const channel::Propagator prop(channel, rx);
    const std::size_t len = prop.trace_length();
    std::vector<double> data(static_cast<std::size_t>(channel.core_count) *
                             static_cast<std::size_t>(alphabet.size) * len);
    for (int k = 0; k < channel.core_count; ++k) {
      for (int i = 0; i < alphabet.size; ++i) {
        const auto trace = prop.noiseless(k, alphabet.frequency(i));
        std::copy(trace.samples.begin(), trace.samples.end(),
                  data.begin() + static_cast<std::ptrdiff_t>(offset(k, i, alphabet.size, len)));
      }
    }
    return FingerprintBank(channel.spec, channel.core_count, alphabet, rx, std::move(data));
  }

  const FiberSpec& fiber() const { return fiber_; }
  int core_count() const { return core_count_; }
  const FrequencyAlphabet& alphabet() const { return alphabet_; }
  const ReceiverSpec& receiver() const { return rx_; }
  int symbol_count() const { return alphabet_.size; }
  std::size_t trace_length() const { return length_; }
  std::size_t size() const { return static_cast<std::size_t>(core_count_) * static_cast<std::size_t>(alphabet_.size); }

  std::span<const double> fingerprint(int core, int symbol) const {
    check_core(core);
    if (symbol < 0 || symbol >= alphabet_.size) throw InvalidParameter("symbol index out of range");
    return {traces_.data() + offset(core, symbol, alphabet_.size, length_), length_};
  }

  // Raises GeometryError unless the trace can be decoded against this bank at core.
  void check_geometry(const IntensityTrace& trace, int core) const {
    check_core(core);
    if (trace.samples.size() != length_) throw GeometryError("trace length does not match bank");
    if (std::abs(trace.sample_rate_hz - rx_.sample_rate_hz) > 1e-9 * rx_.sample_rate_hz) {
      throw GeometryError("trace sample rate does not match bank");
    }
  }

  // Pearson score of the trace against every symbol at one core, written to out.
  // A constant trace (undefined correlation) scores 0 everywhere.
  void scores(std::span<const double> x, int core, std::span<double> out) const {
    const CoreTemplates& t = templates_[static_cast<std::size_t>(core)];
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    double sum = 0.0;
    for (double v : x) sum += v;
    const double mean = sum / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    if (!(ss > 0.0)) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    const double inv_norm = 1.0 / std::sqrt(ss);
    const std::size_t w = t.hi - t.lo;
    const double* xs = x.data() + t.lo;
    for (int i = 0; i < alphabet_.size; ++i) {
      if (!t.valid[static_cast<std::size_t>(i)]) {
        out[static_cast<std::size_t>(i)] = 0.0;
        continue;
      }
      const double* tp = t.values.data() + static_cast<std::size_t>(i) * w;
      double acc = 0.0;
      for (std::size_t j = 0; j < w; ++j) acc += xs[j] * tp[j];
      acc += t.outside[static_cast<std::size_t>(i)] * sum;
      out[static_cast<std::size_t>(i)] = acc * inv_norm;
    }
  }

  // Energy of the unit-level fingerprint, <f, f>.
  double energy(int core, int symbol) const {
    const auto f = fingerprint(core, symbol);
    double e = 0.0;
    for (double v : f) e += v * v;
    return e;
  }

  bool same_data(const FingerprintBank& other) const {
    return fiber_ == other.fiber_ && core_count_ == other.core_count_ && alphabet_ == other.alphabet_ &&
           rx_ == other.rx_ && traces_ == other.traces_;
  }

 private:
  struct CoreTemplates {
    std::size_t lo = 0, hi = 0;
    std::vector<double> values;   // S x (hi - lo)
    std::vector<double> outside;  // c_f per symbol
    std::vector<char> valid;
  };

  static std::size_t offset(int core, int symbol, int symbols, std::size_t len) {
    return (static_cast<std::size_t>(core) * static_cast<std::size_t>(symbols) + static_cast<std::size_t>(symbol)) * len;
  }

  void check_core(int core) const {
    if (core < 0 || core >= core_count_) throw InvalidParameter("core index out of range");
  }

  void prepare_templates() {
    templates_.resize(static_cast<std::size_t>(core_count_));
    const auto n = static_cast<double>(length_);
    for (int k = 0; k < core_count_; ++k) {
      CoreTemplates& t = templates_[static_cast<std::size_t>(k)];
      std::size_t lo = length_, hi = 0;
      for (int i = 0; i < alphabet_.size; ++i) {
        const double* f = traces_.data() + offset(k, i, alphabet_.size, length_);
        for (std::size_t j = 0; j < length_; ++j) {
          if (f[j] != 0.0) {
            lo = std::min(lo, j);
            hi = std::max(hi, j + 1);
          }
        }
      }
      if (hi <= lo) lo = hi = 0;
      t.lo = lo;
      t.hi = hi;
      const std::size_t w = hi - lo;
      t.values.assign(static_cast<std::size_t>(alphabet_.size) * w, 0.0);
      t.outside.assign(static_cast<std::size_t>(alphabet_.size), 0.0);
      t.valid.assign(static_cast<std::size_t>(alphabet_.size), 0);
      for (int i = 0; i < alphabet_.size; ++i) {
        const double* f = traces_.data() + offset(k, i, alphabet_.size, length_);
        if (std::all_of(f, f + length_, [&](double v) { return v == f[0]; })) continue;
        double mean = 0.0;
        for (std::size_t j = 0; j < length_; ++j) mean += f[j];
        mean /= n;
        double ss = 0.0;
        for (std::size_t j = 0; j < length_; ++j) ss += (f[j] - mean) * (f[j] - mean);
        if (!(ss > 0.0)) continue;
        const double inv = 1.0 / std::sqrt(ss);
        const double c = -mean * inv;
        t.valid[static_cast<std::size_t>(i)] = 1;
        t.outside[static_cast<std::size_t>(i)] = c;
        double* tp = t.values.data() + static_cast<std::size_t>(i) * w;
        for (std::size_t j = 0; j < w; ++j) tp[j] = (f[lo + j] - mean) * inv - c;
      }
    }
  }

  FiberSpec fiber_;
  int core_count_;
  FrequencyAlphabet alphabet_;
  ReceiverSpec rx_;
  std::vector<double> traces_;
  std::size_t length_ = 0;
  std::vector<CoreTemplates> templates_;
};

inline FingerprintBank build_bank(const ChannelInstance& channel, const FrequencyAlphabet& alphabet,
                                  const ReceiverSpec& rx) {
  return FingerprintBank::build(channel, alphabet, rx);
}

namespace detail {
inline Decision argmax(std::span<const double> scores) {
  Decision d{0, scores.empty() ? 0.0 : scores[0]};
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > d.score) d = {static_cast<int>(i), scores[i]};
  }
  return d;
}
}  // namespace detail

// Closest fingerprint by Pearson correlation; ties go to the smallest index.
inline Decision decode_frequency(const IntensityTrace& trace, const FingerprintBank& bank, int core) {
  bank.check_geometry(trace, core);
  std::vector<double> s(static_cast<std::size_t>(bank.symbol_count()));
  bank.scores(trace.samples, core, s);
  return detail::argmax(s);
}

// Least-squares intensity scale against the decided symbol's unit-level
// fingerprint, quantised to the nearest PAM level.
inline int decode_level(const IntensityTrace& trace, const FingerprintBank& bank, int core, int symbol_index,
                        const PamScheme& pam) {
  bank.check_geometry(trace, core);
  const auto f = bank.fingerprint(core, symbol_index);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    num += trace.samples[j] * f[j];
    den += f[j] * f[j];
  }
  const double scale = den > 0.0 ? num / den : 0.0;
  return pam.nearest(scale);
}

// Sum of per-core Pearson scores; one trace per core, in core order.
inline Decision fuse_decode(std::span<const IntensityTrace> traces, const FingerprintBank& bank) {
  if (traces.size() != static_cast<std::size_t>(bank.core_count())) {
    throw GeometryError("fuse_decode: expected one trace per core");
  }
  const auto s = static_cast<std::size_t>(bank.symbol_count());
  std::vector<double> total(s, 0.0), part(s);
  for (int k = 0; k < bank.core_count(); ++k) {
    const auto& trace = traces[static_cast<std::size_t>(k)];
    bank.check_geometry(trace, k);
    bank.scores(trace.samples, k, part);
    for (std::size_t i = 0; i < s; ++i) total[i] += part[i];
  }
  return detail::argmax(total);
}

// Delivered bit rate over occupied bandwidth, bits/s/Hz.
inline double spectral_efficiency(double symbol_rate_hz, double bits_per_symbol, double spacing_hz, int channels) {
  require(symbol_rate_hz > 0.0 && bits_per_symbol > 0.0 && spacing_hz > 0.0 && channels > 0,
          "spectral_efficiency: arguments must be positive");
  return symbol_rate_hz * bits_per_symbol / (spacing_hz * static_cast<double>(channels));
}

// One symbol per byte, code point as symbol index, top PAM level.
inline SymbolStream ascii_encode(std::string_view text, const PamScheme& pam = {}) {
  SymbolStream out;
  out.reserve(text.size());
  for (unsigned char c : text) {
    if (c >= 128) throw InvalidParameter("ascii_encode: byte " + std::to_string(c) + " is not ASCII");
    out.push_back({static_cast<int>(c), pam.top()});
  }
  return out;
}

inline std::string ascii_decode(const SymbolStream& stream) {
  std::string out;
  out.reserve(stream.size());
  for (const auto& s : stream) {
    if (s.symbol_index < 0 || s.symbol_index >= 128) throw InvalidParameter("ascii_decode: symbol out of range");
    out.push_back(static_cast<char>(s.symbol_index));
  }
  return out;
}

}  // namespace mmfcomm::codec
