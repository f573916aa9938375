#pragma once

// Flat "key = value" configuration for the experiment sweeps.
//
// Lines starting with '#' are comments. Lists are comma-separated. Every key
// has a default (see README); unknown keys are rejected. to_key_values()
// echoes a fully resolved configuration that load_config() reproduces exactly.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mmfcomm/channel.hpp"
#include "mmfcomm/codec.hpp"
#include "mmfcomm/error.hpp"
#include "mmfcomm/semantic.hpp"
#include "mmfcomm/sentiment.hpp"
#include "mmfcomm/text.hpp"

namespace mmfcomm::harness {

enum class Axis { kSpacing, kSampleRate, kSnr, kErrorRate };

inline const char* axis_key(Axis a) {
  switch (a) {
    case Axis::kSpacing: return "sweep.spacing_hz";
    case Axis::kSampleRate: return "sweep.sample_rate_hz";
    case Axis::kSnr: return "sweep.snr_db";
    case Axis::kErrorRate: return "sweep.error_rate";
  }
  return "";
}

enum class SemanticPath { kChannel, kPerturb };

struct SweepConfig {
  channel::FiberSpec fiber;
  channel::ReceiverSpec rx;
  codec::FrequencyAlphabet alphabet;
  codec::PamScheme pam;
  int cores = 7;
  int core = 0;  // receiving core for single-core experiments
  int trials = 10000;
  std::uint64_t master_seed = 1;
  Axis axis = Axis::kSpacing;
  std::vector<double> axis_values{600e3};
  bool fusion = false;
  int workers = 1;

  // offset histogram
  int probe_trials = 200;
  double target_ser_lo = 0.38;
  double target_ser_hi = 0.48;

  // semantic robustness
  SemanticPath semantic_path = SemanticPath::kChannel;
  sentiment::CorpusConfig corpus;
  sentiment::TrainConfig train;
  semantic::OffsetErrorModel offsets;
  int semantic_seeds = 20;
  int sequences_per_seed = 50;
  int order_start = 0;

  void validate() const {
    fiber.validate();
    rx.validate();
    alphabet.validate();
    pam.validate();
    require(cores >= 1, "cores must be >= 1");
    require(core >= 0 && core < cores, "core must lie in [0, cores)");
    require(trials >= 1, "trials must be >= 1");
    require(!axis_values.empty(), "sweep axis must not be empty");
    require(workers >= 1, "workers must be >= 1");
    require(probe_trials >= 1, "offsets.probe_trials must be >= 1");
    require(target_ser_lo > 0.0 && target_ser_lo < target_ser_hi && target_ser_hi < 1.0,
            "offsets target window must satisfy 0 < lo < hi < 1");
    corpus.validate();
    train.validate();
    require(semantic_seeds >= 1 && sequences_per_seed >= 1, "semantic.seeds and semantic.sequences_per_seed must be >= 1");
    require(order_start >= 0 && order_start < corpus.vocab_size, "semantic.order_start out of range");
    for (double v : axis_values) {
      require(std::isfinite(v) || axis == Axis::kSnr, "sweep values must be finite");
      switch (axis) {
        case Axis::kSpacing: require(v > 0.0, "sweep.spacing_hz values must be > 0"); break;
        case Axis::kSampleRate: require(v > 0.0, "sweep.sample_rate_hz values must be > 0"); break;
        case Axis::kErrorRate: require(v >= 0.0 && v <= 1.0, "sweep.error_rate values must lie in [0, 1]"); break;
        case Axis::kSnr: require(!std::isnan(v), "sweep.snr_db values must not be NaN"); break;
      }
    }
  }
};

namespace detail {

inline std::vector<double> parse_list(std::string_view value, std::string_view key) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto item = text::trim(value.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (item.empty()) throw ParseError(std::string(key) + ": empty list element");
    out.push_back(text::parse_real(item, key));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string format_list(const std::vector<double>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? "," : "") + text::format_real(values[i]);
  return s;
}

inline bool parse_bool(std::string_view v, std::string_view key) {
  v = text::trim(v);
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw ParseError(std::string(key) + ": expected on/off");
}

}  // namespace detail

// Applies one key/value pair; throws ParseError on unknown keys or bad values.
inline void apply_setting(SweepConfig& c, std::string_view key, std::string_view value) {
  using text::parse_int;
  using text::parse_real;
  const std::string k(key);
  auto real = [&] { return parse_real(value, key); };
  auto integer = [&] { return parse_int<int>(value, key); };

  if (k == "fiber.length_m") c.fiber.length_m = real();
  else if (k == "fiber.n_avg") c.fiber.n_avg = real();
  else if (k == "fiber.delta_n") c.fiber.delta_n = real();
  else if (k == "fiber.modes") c.fiber.mode_count = integer();
  else if (k == "fiber.theta_spread_s") c.fiber.theta_spread_s = real();
  else if (k == "fiber.rng_seed") c.fiber.rng_seed = parse_int<std::uint64_t>(value, key);
  else if (k == "rx.sample_rate_hz") c.rx.sample_rate_hz = real();
  else if (k == "rx.symbol_period_s") c.rx.symbol_period_s = real();
  else if (k == "rx.pulse_width_s") c.rx.pulse_width_s = real();
  else if (k == "rx.snr_db") c.rx.snr_db = real();
  else if (k == "rx.oversample") c.rx.oversample = integer();
  else if (k == "alphabet.start_offset_hz") c.alphabet.start_offset_hz = real();
  else if (k == "alphabet.size") c.alphabet.size = integer();
  else if (k == "alphabet.spacing_hz") c.alphabet.spacing_hz = real();
  else if (k == "pam.levels") c.pam.levels = detail::parse_list(value, key);
  else if (k == "cores") c.cores = integer();
  else if (k == "core") c.core = integer();
  else if (k == "trials") c.trials = integer();
  else if (k == "seed") c.master_seed = parse_int<std::uint64_t>(value, key);
  else if (k == "fusion") c.fusion = detail::parse_bool(value, key);
  else if (k == "workers") c.workers = integer();
  else if (k == "sweep.spacing_hz") { c.axis = Axis::kSpacing; c.axis_values = detail::parse_list(value, key); }
  else if (k == "sweep.sample_rate_hz") { c.axis = Axis::kSampleRate; c.axis_values = detail::parse_list(value, key); }
  else if (k == "sweep.snr_db") { c.axis = Axis::kSnr; c.axis_values = detail::parse_list(value, key); }
  else if (k == "sweep.error_rate") { c.axis = Axis::kErrorRate; c.axis_values = detail::parse_list(value, key); }
  else if (k == "offsets.probe_trials") c.probe_trials = integer();
  else if (k == "offsets.target_ser_lo") c.target_ser_lo = real();
  else if (k == "offsets.target_ser_hi") c.target_ser_hi = real();
  else if (k == "semantic.path") {
    const auto v = text::trim(value);
    if (v == "channel") c.semantic_path = SemanticPath::kChannel;
    else if (v == "perturb") c.semantic_path = SemanticPath::kPerturb;
    else throw ParseError("semantic.path: expected channel or perturb");
  }
  else if (k == "semantic.vocab_size") c.corpus.vocab_size = integer();
  else if (k == "semantic.dim") c.corpus.dim = integer();
  else if (k == "semantic.train_n") c.corpus.train_n = integer();
  else if (k == "semantic.test_n") c.corpus.test_n = integer();
  else if (k == "semantic.seq_len") c.corpus.seq_len = integer();
  else if (k == "semantic.corpus_seed") c.corpus.seed = parse_int<std::uint64_t>(value, key);
  else if (k == "semantic.corpus_bias") c.corpus.bias = real();
  else if (k == "semantic.corpus_noise") c.corpus.noise = real();
  else if (k == "semantic.learning_rate") c.train.learning_rate = real();
  else if (k == "semantic.epochs") c.train.epochs = integer();
  else if (k == "semantic.l2") c.train.l2 = real();
  else if (k == "semantic.offset_weights") c.offsets.offset_weights = detail::parse_list(value, key);
  else if (k == "semantic.seeds") c.semantic_seeds = integer();
  else if (k == "semantic.sequences_per_seed") c.sequences_per_seed = integer();
  else if (k == "semantic.order_start") c.order_start = integer();
  else throw ParseError("unknown config key '" + k + "'");
}

inline std::map<std::string, std::string> to_key_values(const SweepConfig& c) {
  using text::format_real;
  std::map<std::string, std::string> kv;
  kv["fiber.length_m"] = format_real(c.fiber.length_m);
  kv["fiber.n_avg"] = format_real(c.fiber.n_avg);
  kv["fiber.delta_n"] = format_real(c.fiber.delta_n);
  kv["fiber.modes"] = std::to_string(c.fiber.mode_count);
  kv["fiber.theta_spread_s"] = format_real(c.fiber.theta_spread_s);
  kv["fiber.rng_seed"] = std::to_string(c.fiber.rng_seed);
  kv["rx.sample_rate_hz"] = format_real(c.rx.sample_rate_hz);
  kv["rx.symbol_period_s"] = format_real(c.rx.symbol_period_s);
  kv["rx.pulse_width_s"] = format_real(c.rx.pulse_width_s);
  kv["rx.snr_db"] = format_real(c.rx.snr_db);
  kv["rx.oversample"] = std::to_string(c.rx.oversample);
  kv["alphabet.start_offset_hz"] = format_real(c.alphabet.start_offset_hz);
  kv["alphabet.size"] = std::to_string(c.alphabet.size);
  kv["alphabet.spacing_hz"] = format_real(c.alphabet.spacing_hz);
  kv["pam.levels"] = detail::format_list(c.pam.levels);
  kv["cores"] = std::to_string(c.cores);
  kv["core"] = std::to_string(c.core);
  kv["trials"] = std::to_string(c.trials);
  kv["seed"] = std::to_string(c.master_seed);
  kv["fusion"] = c.fusion ? "on" : "off";
  kv[axis_key(c.axis)] = detail::format_list(c.axis_values);
  kv["offsets.probe_trials"] = std::to_string(c.probe_trials);
  kv["offsets.target_ser_lo"] = format_real(c.target_ser_lo);
  kv["offsets.target_ser_hi"] = format_real(c.target_ser_hi);
  kv["semantic.path"] = c.semantic_path == SemanticPath::kChannel ? "channel" : "perturb";
  kv["semantic.vocab_size"] = std::to_string(c.corpus.vocab_size);
  kv["semantic.dim"] = std::to_string(c.corpus.dim);
  kv["semantic.train_n"] = std::to_string(c.corpus.train_n);
  kv["semantic.test_n"] = std::to_string(c.corpus.test_n);
  kv["semantic.seq_len"] = std::to_string(c.corpus.seq_len);
  kv["semantic.corpus_seed"] = std::to_string(c.corpus.seed);
  kv["semantic.corpus_bias"] = format_real(c.corpus.bias);
  kv["semantic.corpus_noise"] = format_real(c.corpus.noise);
  kv["semantic.learning_rate"] = format_real(c.train.learning_rate);
  kv["semantic.epochs"] = std::to_string(c.train.epochs);
  kv["semantic.l2"] = format_real(c.train.l2);
  kv["semantic.offset_weights"] = detail::format_list(c.offsets.offset_weights);
  kv["semantic.seeds"] = std::to_string(c.semantic_seeds);
  kv["semantic.sequences_per_seed"] = std::to_string(c.sequences_per_seed);
  kv["semantic.order_start"] = std::to_string(c.order_start);
  // workers is deliberately not echoed: it never changes results.
  return kv;
}

// Applies every "key = value" line of a config stream on top of `base`.
inline SweepConfig load_config(std::istream& in, SweepConfig base) {
  std::string line;
  int number = 0;
  while (text::next_line(in, line)) {
    ++number;
    const auto s = text::trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config line " + std::to_string(number) + ": expected key = value");
    }
    apply_setting(base, text::trim(s.substr(0, eq)), text::trim(s.substr(eq + 1)));
  }
  return base;
}

inline SweepConfig load_config_file(const std::string& path, SweepConfig base) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path);
  return load_config(in, std::move(base));
}

inline std::string write_config(const SweepConfig& c) {
  std::ostringstream out;
  for (const auto& [k, v] : to_key_values(c)) out << k << " = " << v << '\n';
  return out.str();
}

}  // namespace mmfcomm::harness
