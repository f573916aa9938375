#pragma once

// Seeded Monte Carlo sweeps. Every trial draws its symbol and noise from
// derive_seed(master, {point, trial, ...}), so tables are identical for any
// worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmfcomm/channel.hpp"
#include "mmfcomm/codec.hpp"
#include "mmfcomm/harness/config.hpp"
#include "mmfcomm/harness/parallel.hpp"
#include "mmfcomm/harness/table.hpp"
#include "mmfcomm/random.hpp"
#include "mmfcomm/semantic.hpp"
#include "mmfcomm/semantic_io.hpp"
#include "mmfcomm/sentiment.hpp"

namespace mmfcomm::harness {

enum class Experiment { kSerSpacing, kSerRate, kPam, kOffsets, kSemantic, kBankBuild };

// Calibrated default fixture for each experiment.
inline SweepConfig preset(Experiment e) {
  SweepConfig c;
  switch (e) {
    case Experiment::kSerSpacing:
      c.axis = Axis::kSpacing;
      c.axis_values = {2.5e3, 5e3, 10e3, 20e3, 40e3};
      break;
    case Experiment::kPam:
      c.axis = Axis::kSnr;
      c.axis_values = {0.0, 10.0, 25.0};
      break;
    case Experiment::kSerRate:
      c.axis = Axis::kSampleRate;
      c.axis_values = {6e9, 7e9, 8e9, 9e9, 10e9, 11e9};
      c.rx.snr_db = 15.0;
      c.fusion = true;
      break;
    case Experiment::kOffsets:
      c.axis = Axis::kSpacing;
      c.axis_values = {10e3};  // starting point of the spacing search
      c.rx.snr_db = 20.0;
      break;
    case Experiment::kSemantic:
      c.axis = Axis::kSampleRate;
      c.axis_values = {1e9, 2e9, 4e9, 6e9, 8e9, 10e9};
      c.alphabet.spacing_hz = 30e3;
      c.rx.snr_db = 15.0;
      c.alphabet.size = c.corpus.vocab_size;
      c.cores = 1;
      break;
    case Experiment::kBankBuild:
      c.axis = Axis::kSpacing;
      c.axis_values = {c.alphabet.spacing_hz};
      break;
  }
  return c;
}

inline const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::kSerSpacing: return "ser-spacing";
    case Experiment::kSerRate: return "ser-rate";
    case Experiment::kPam: return "pam";
    case Experiment::kOffsets: return "offsets";
    case Experiment::kSemantic: return "semantic";
    case Experiment::kBankBuild: return "bank-build";
  }
  return "";
}

namespace detail {

inline void require_axis(const SweepConfig& cfg, Axis axis, const char* experiment) {
  if (cfg.axis != axis) {
    throw InvalidParameter(std::string(experiment) + " needs " + axis_key(axis) + " to be set");
  }
}

inline void stamp(ResultTable& t, const SweepConfig& cfg, Experiment e) {
  auto& m = t.metadata();
  m["experiment"] = experiment_name(e);
  m["artifact_version"] = kArtifactVersion;
  m["master_seed"] = cfg.master_seed;
  m["config"] = to_key_values(cfg);
}

struct TrialOutcome {
  int symbol = 0;
  int decoded = 0;
};

// Sends `trials` uniformly random symbols through one core at unit level.
inline std::vector<TrialOutcome> run_single_core(const channel::Propagator& prop, const codec::FingerprintBank& bank,
                                                 int core, int trials, std::uint64_t master,
                                                 std::uint64_t point, int workers) {
  std::vector<TrialOutcome> out(static_cast<std::size_t>(trials));
  const auto& alphabet = bank.alphabet();
  parallel_for(out.size(), workers, [&](std::size_t t) {
    Rng rng(derive_seed(master, {point, t}));
    const int symbol = static_cast<int>(rng.below(static_cast<std::uint64_t>(alphabet.size)));
    const auto trace = prop.transmit(core, alphabet.frequency(symbol), 1.0, rng.next());
    out[t] = {symbol, codec::decode_frequency(trace, bank, core).symbol_index};
  });
  return out;
}

inline double error_rate(const std::vector<TrialOutcome>& outcomes) {
  std::size_t errors = 0;
  for (const auto& o : outcomes) errors += o.symbol != o.decoded;
  return static_cast<double>(errors) / static_cast<double>(outcomes.size());
}

}  // namespace detail

inline ResultTable run_ser_vs_spacing(const SweepConfig& cfg) {
  cfg.validate();
  detail::require_axis(cfg, Axis::kSpacing, "ser-spacing");
  const auto channel = channel::synthesize_channel(cfg.fiber, cfg.cores);
  const channel::Propagator prop(channel, cfg.rx);
  ResultTable table({{"spacing_hz"}, {"trials", true}, {"errors", true}, {"ser"}});
  for (std::size_t p = 0; p < cfg.axis_values.size(); ++p) {
    auto alphabet = cfg.alphabet;
    alphabet.spacing_hz = cfg.axis_values[p];
    const auto bank = codec::build_bank(channel, alphabet, cfg.rx);
    const auto outcomes = detail::run_single_core(prop, bank, cfg.core, cfg.trials, cfg.master_seed, p, cfg.workers);
    const double ser = detail::error_rate(outcomes);
    table.add_row({alphabet.spacing_hz, static_cast<double>(cfg.trials), std::round(ser * cfg.trials), ser});
  }
  detail::stamp(table, cfg, Experiment::kSerSpacing);
  return table;
}

inline ResultTable run_pam(const SweepConfig& cfg) {
  cfg.validate();
  detail::require_axis(cfg, Axis::kSnr, "pam");
  const auto channel = channel::synthesize_channel(cfg.fiber, cfg.cores);
  const auto bank = codec::build_bank(channel, cfg.alphabet, cfg.rx);
  ResultTable table({{"snr_db"}, {"trials", true}, {"freq_errors", true}, {"level_errors", true},
                     {"freq_ser"}, {"level_ser"}});
  const auto levels = static_cast<std::uint64_t>(cfg.pam.levels.size());
  for (std::size_t p = 0; p < cfg.axis_values.size(); ++p) {
    auto rx = cfg.rx;
    rx.snr_db = cfg.axis_values[p];
    const channel::Propagator prop(channel, rx);
    std::vector<std::pair<char, char>> wrong(static_cast<std::size_t>(cfg.trials));
    parallel_for(wrong.size(), cfg.workers, [&](std::size_t t) {
      Rng rng(derive_seed(cfg.master_seed, {p, t}));
      const int symbol = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.alphabet.size)));
      const int level = static_cast<int>(rng.below(levels));
      const auto trace = prop.transmit(cfg.core, cfg.alphabet.frequency(symbol),
                                       cfg.pam.levels[static_cast<std::size_t>(level)], rng.next());
      const int decoded = codec::decode_frequency(trace, bank, cfg.core).symbol_index;
      const int decoded_level = codec::decode_level(trace, bank, cfg.core, decoded, cfg.pam);
      wrong[t] = {static_cast<char>(decoded != symbol), static_cast<char>(decoded_level != level)};
    });
    double fe = 0.0, le = 0.0;
    for (const auto& [f, l] : wrong) {
      fe += f;
      le += l;
    }
    table.add_row({rx.snr_db, static_cast<double>(cfg.trials), fe, le, fe / cfg.trials, le / cfg.trials});
  }
  detail::stamp(table, cfg, Experiment::kPam);
  return table;
}

// Per-core and fused symbol error rates on shared trials.
inline ResultTable run_ser_vs_rate(const SweepConfig& cfg) {
  cfg.validate();
  detail::require_axis(cfg, Axis::kSampleRate, "ser-rate");
  require(cfg.fusion, "ser-rate needs fusion = on");
  const auto channel = channel::synthesize_channel(cfg.fiber, cfg.cores);
  const auto k_count = static_cast<std::size_t>(cfg.cores);

  std::vector<Column> cols{{"sample_rate_hz"}, {"trials", true}};
  for (std::size_t k = 0; k < k_count; ++k) cols.push_back({"errors_core" + std::to_string(k), true});
  cols.push_back({"errors_fused", true});
  for (std::size_t k = 0; k < k_count; ++k) cols.push_back({"ser_core" + std::to_string(k)});
  cols.push_back({"ser_fused"});
  ResultTable table(std::move(cols));

  for (std::size_t p = 0; p < cfg.axis_values.size(); ++p) {
    auto rx = cfg.rx;
    rx.sample_rate_hz = cfg.axis_values[p];
    const auto bank = codec::build_bank(channel, cfg.alphabet, rx);
    const channel::Propagator prop(channel, rx);
    // wrong[t * (K + 1) + k], last slot is the fused decision
    std::vector<char> wrong(static_cast<std::size_t>(cfg.trials) * (k_count + 1));
    parallel_for(static_cast<std::size_t>(cfg.trials), cfg.workers, [&](std::size_t t) {
      Rng rng(derive_seed(cfg.master_seed, {p, t}));
      const int symbol = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.alphabet.size)));
      const double f = cfg.alphabet.frequency(symbol);
      std::vector<channel::IntensityTrace> traces;
      traces.reserve(k_count);
      for (std::size_t k = 0; k < k_count; ++k) {
        traces.push_back(prop.transmit(static_cast<int>(k), f, 1.0, rng.next()));
        wrong[t * (k_count + 1) + k] = codec::decode_frequency(traces.back(), bank, static_cast<int>(k)).symbol_index != symbol;
      }
      wrong[t * (k_count + 1) + k_count] = codec::fuse_decode(traces, bank).symbol_index != symbol;
    });
    std::vector<double> errors(k_count + 1, 0.0);
    for (std::size_t t = 0; t < static_cast<std::size_t>(cfg.trials); ++t) {
      for (std::size_t k = 0; k <= k_count; ++k) errors[k] += wrong[t * (k_count + 1) + k];
    }
    std::vector<double> row{rx.sample_rate_hz, static_cast<double>(cfg.trials)};
    row.insert(row.end(), errors.begin(), errors.end());
    for (double e : errors) row.push_back(e / cfg.trials);
    table.add_row(std::move(row));
  }
  detail::stamp(table, cfg, Experiment::kSerRate);
  return table;
}

// Finds a spacing whose symbol error rate lands in the target window, then
// histograms (decoded - sent) over the errors of a full run at that spacing.
inline ResultTable run_offset_hist(const SweepConfig& cfg) {
  cfg.validate();
  detail::require_axis(cfg, Axis::kSpacing, "offsets");
  const auto channel = channel::synthesize_channel(cfg.fiber, cfg.cores);
  const channel::Propagator prop(channel, cfg.rx);
  const double target = 0.5 * (cfg.target_ser_lo + cfg.target_ser_hi);
  // Probes aim for the central half of the window so the full run stays inside it.
  const double accept_lo = target - 0.25 * (cfg.target_ser_hi - cfg.target_ser_lo);
  const double accept_hi = target + 0.25 * (cfg.target_ser_hi - cfg.target_ser_lo);

  std::uint64_t probe_index = 0;
  auto probe = [&](double spacing) {
    auto alphabet = cfg.alphabet;
    alphabet.spacing_hz = spacing;
    const auto bank = codec::build_bank(channel, alphabet, cfg.rx);
    const auto outcomes = detail::run_single_core(prop, bank, cfg.core, cfg.probe_trials, cfg.master_seed,
                                                  1'000'000 + probe_index++, cfg.workers);
    return detail::error_rate(outcomes);
  };

  // Coarse bracket by factors of two, then geometric bisection.
  double spacing = cfg.axis_values.front();
  double ser = probe(spacing);
  double narrow = spacing, wide = spacing;  // ser(narrow) >= target > ser(wide)
  bool bracketed = false;
  for (int i = 0; i < 40 && !bracketed; ++i) {
    if (ser >= accept_lo && ser <= accept_hi) break;
    if (ser >= target) {
      narrow = spacing;
      spacing *= 2.0;
    } else {
      wide = spacing;
      spacing *= 0.5;
    }
    const double next = probe(spacing);
    if ((ser >= target) != (next >= target)) {
      bracketed = true;
      if (next >= target) narrow = spacing; else wide = spacing;
    }
    ser = next;
  }
  if (bracketed && !(ser >= accept_lo && ser <= accept_hi)) {
    for (int i = 0; i < 40; ++i) {
      spacing = std::sqrt(narrow * wide);
      ser = probe(spacing);
      if (ser >= accept_lo && ser <= accept_hi) break;
      if (ser >= target) narrow = spacing; else wide = spacing;
    }
  }

  auto alphabet = cfg.alphabet;
  alphabet.spacing_hz = spacing;
  const auto bank = codec::build_bank(channel, alphabet, cfg.rx);
  const auto outcomes = detail::run_single_core(prop, bank, cfg.core, cfg.trials, cfg.master_seed, 0, cfg.workers);
  std::map<int, long long> histogram;
  long long errors = 0;
  for (const auto& o : outcomes) {
    if (o.decoded != o.symbol) {
      ++histogram[o.decoded - o.symbol];
      ++errors;
    }
  }
  ResultTable table({{"offset", true}, {"count", true}, {"fraction"}});
  for (const auto& [offset, count] : histogram) {
    table.add_row({static_cast<double>(offset), static_cast<double>(count),
                   static_cast<double>(count) / static_cast<double>(errors)});
  }
  detail::stamp(table, cfg, Experiment::kOffsets);
  table.metadata()["tuned_spacing_hz"] = spacing;
  table.metadata()["probes"] = probe_index;
  table.metadata()["trials"] = cfg.trials;
  table.metadata()["errors"] = errors;
  table.metadata()["ser"] = static_cast<double>(errors) / static_cast<double>(cfg.trials);
  return table;
}

// Semantic robustness: send test sequences through the channel (or the
// offset-model fast path) under greedy semantic ordering and under the
// original ordering, then classify the received token sequences.
inline ResultTable run_semantic(const SweepConfig& cfg) {
  cfg.validate();
  const bool via_channel = cfg.semantic_path == SemanticPath::kChannel;
  detail::require_axis(cfg, via_channel ? Axis::kSampleRate : Axis::kErrorRate, "semantic");
  if (!via_channel) cfg.offsets.validate();

  const auto corpus = sentiment::synth_corpus(cfg.corpus);
  const auto clf = sentiment::train(corpus.train, corpus.table, cfg.train);
  const double clean = sentiment::evaluate(clf, corpus.test, corpus.table);
  const int vocab = cfg.corpus.vocab_size;

  const semantic::IndexPermutation orders[2] = {semantic::greedy_order(corpus.table, cfg.order_start),
                                                semantic::IndexPermutation::identity(static_cast<std::size_t>(vocab))};
  const std::vector<int> inverses[2] = {orders[0].inverse(), orders[1].inverse()};

  auto alphabet = cfg.alphabet;
  alphabet.size = vocab;
  std::optional<channel::ChannelInstance> channel;
  if (via_channel) channel = channel::synthesize_channel(cfg.fiber, cfg.cores);

  ResultTable table({{via_channel ? "sample_rate_hz" : "error_rate"}, {"symbols", true}, {"ser"},
                     {"cls_error_greedy"}, {"cls_error_baseline"}, {"clean_error"}});
  const auto jobs = static_cast<std::size_t>(cfg.semantic_seeds) * static_cast<std::size_t>(cfg.sequences_per_seed);
  const auto test_n = corpus.test.samples.size();

  for (std::size_t p = 0; p < cfg.axis_values.size(); ++p) {
    std::optional<codec::FingerprintBank> bank;
    std::optional<channel::Propagator> prop;
    semantic::OffsetErrorModel model = cfg.offsets;
    auto rx = cfg.rx;
    if (via_channel) {
      rx.sample_rate_hz = cfg.axis_values[p];
      bank.emplace(codec::build_bank(*channel, alphabet, rx));
      prop.emplace(*channel, rx);
    } else {
      model.error_rate = cfg.axis_values[p];
    }

    struct JobResult {
      long long symbols = 0;
      long long symbol_errors = 0;
      char wrong[2] = {0, 0};
    };
    std::vector<JobResult> results(jobs);
    parallel_for(jobs, cfg.workers, [&](std::size_t job) {
      const std::size_t seed = job / static_cast<std::size_t>(cfg.sequences_per_seed);
      const std::size_t slot = job % static_cast<std::size_t>(cfg.sequences_per_seed);
      const auto& sample = corpus.test.samples[(seed * static_cast<std::size_t>(cfg.sequences_per_seed) + slot) % test_n];
      JobResult r;
      for (int o = 0; o < 2; ++o) {
        std::vector<int> symbols(sample.tokens.size());
        for (std::size_t q = 0; q < symbols.size(); ++q) {
          symbols[q] = inverses[o][static_cast<std::size_t>(sample.tokens[q])];
        }
        std::vector<int> received(symbols.size());
        if (via_channel) {
          for (std::size_t q = 0; q < symbols.size(); ++q) {
            const auto noise_seed = derive_seed(cfg.master_seed, {p, seed, slot, q});
            const auto trace = prop->transmit(cfg.core, alphabet.frequency(symbols[q]), 1.0, noise_seed);
            received[q] = codec::decode_frequency(trace, *bank, cfg.core).symbol_index;
          }
        } else {
          received = semantic::perturb(symbols, model, vocab, derive_seed(cfg.master_seed, {p, seed, slot}));
        }
        std::vector<int> tokens(received.size());
        for (std::size_t q = 0; q < received.size(); ++q) {
          tokens[q] = orders[o].order[static_cast<std::size_t>(received[q])];
          r.symbol_errors += received[q] != symbols[q];
        }
        r.symbols += static_cast<long long>(symbols.size());
        r.wrong[o] = sentiment::classify(clf, tokens, corpus.table) != sample.label;
      }
      results[job] = r;
    });

    long long symbols = 0, symbol_errors = 0, wrong_greedy = 0, wrong_base = 0;
    for (const auto& r : results) {
      symbols += r.symbols;
      symbol_errors += r.symbol_errors;
      wrong_greedy += r.wrong[0];
      wrong_base += r.wrong[1];
    }
    const auto n = static_cast<double>(jobs);
    table.add_row({cfg.axis_values[p], static_cast<double>(symbols),
                   static_cast<double>(symbol_errors) / static_cast<double>(symbols), wrong_greedy / n,
                   wrong_base / n, clean});
  }
  detail::stamp(table, cfg, Experiment::kSemantic);
  table.metadata()["greedy_adjacency_mean"] = semantic::adjacency_mean(orders[0], corpus.table);
  table.metadata()["baseline_adjacency_mean"] = semantic::adjacency_mean(orders[1], corpus.table);
  return table;
}

// Greedy ordering of an embedding file, written as a permutation file.
inline semantic::IndexPermutation run_order(std::istream& embeddings, int start, std::ostream& out) {
  const auto table = semantic::read_embeddings(embeddings);
  const auto perm = semantic::greedy_order(table, start);
  semantic::write_permutation(out, perm);
  return perm;
}

}  // namespace mmfcomm::harness
