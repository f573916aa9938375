#pragma once

// Text persistence for fingerprint banks.
//
//   MMFBANK 1 <S> <K> <trace_len> <sample_rate_hz>
//   key=value            provenance: fiber, receiver and alphabet fields
//   ...
//   <samples>            one line per (core, symbol), core-major
//
// Reals are written in shortest round-trip form, so write/read is exact.

#include <map>
#include <ostream>
#include <istream>
#include <string>

#include "mmfcomm/codec.hpp"
#include "mmfcomm/text.hpp"

namespace mmfcomm::codec {

inline constexpr int kBankFormatVersion = 1;

inline void write_bank(std::ostream& out, const FingerprintBank& bank) {
  using text::format_real;
  const auto& f = bank.fiber();
  const auto& rx = bank.receiver();
  const auto& a = bank.alphabet();
  out << "MMFBANK " << kBankFormatVersion << ' ' << a.size << ' ' << bank.core_count() << ' '
      << bank.trace_length() << ' ' << format_real(rx.sample_rate_hz) << '\n';
  out << "fiber.length_m=" << format_real(f.length_m) << '\n';
  out << "fiber.n_avg=" << format_real(f.n_avg) << '\n';
  out << "fiber.delta_n=" << format_real(f.delta_n) << '\n';
  out << "fiber.modes=" << f.mode_count << '\n';
  out << "fiber.theta_spread_s=" << format_real(f.theta_spread_s) << '\n';
  out << "fiber.rng_seed=" << f.rng_seed << '\n';
  out << "cores=" << bank.core_count() << '\n';
  out << "rx.sample_rate_hz=" << format_real(rx.sample_rate_hz) << '\n';
  out << "rx.symbol_period_s=" << format_real(rx.symbol_period_s) << '\n';
  out << "rx.pulse_width_s=" << format_real(rx.pulse_width_s) << '\n';
  out << "rx.snr_db=" << format_real(rx.snr_db) << '\n';
  out << "rx.oversample=" << rx.oversample << '\n';
  out << "alphabet.start_offset_hz=" << format_real(a.start_offset_hz) << '\n';
  out << "alphabet.spacing_hz=" << format_real(a.spacing_hz) << '\n';
  out << "alphabet.size=" << a.size << '\n';
  for (int k = 0; k < bank.core_count(); ++k) {
    for (int i = 0; i < a.size; ++i) {
      const auto fp = bank.fingerprint(k, i);
      for (std::size_t j = 0; j < fp.size(); ++j) {
        if (j) out << ' ';
        out << format_real(fp[j]);
      }
      out << '\n';
    }
  }
}

inline FingerprintBank read_bank(std::istream& in) {
  std::string line;
  if (!text::next_line(in, line)) throw ParseError("bank file: empty input");
  const auto head = text::split_ws(line);
  if (head.size() != 6 || head[0] != "MMFBANK") throw ParseError("bank file: malformed header");
  const int version = text::parse_int<int>(head[1], "bank version");
  if (version != kBankFormatVersion) {
    throw ParseError("bank file: unsupported version " + std::to_string(version));
  }
  const int symbols = text::parse_int<int>(head[2], "bank S");
  const int cores = text::parse_int<int>(head[3], "bank K");
  const auto length = text::parse_int<std::size_t>(head[4], "bank trace_len");
  const double rate = text::parse_real(head[5], "bank sample_rate_hz");
  if (symbols < 2 || cores < 1 || length < 2) throw ParseError("bank file: bad dimensions in header");

  std::map<std::string, std::string, std::less<>> kv;
  const auto expected_keys = {"fiber.length_m", "fiber.n_avg", "fiber.delta_n", "fiber.modes",
                              "fiber.theta_spread_s", "fiber.rng_seed", "cores", "rx.sample_rate_hz",
                              "rx.symbol_period_s", "rx.pulse_width_s", "rx.snr_db", "rx.oversample",
                              "alphabet.start_offset_hz", "alphabet.spacing_hz", "alphabet.size"};
  while (kv.size() < expected_keys.size()) {
    if (!text::next_line(in, line)) throw ParseError("bank file: truncated provenance block");
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("bank file: expected key=value, got '" + line + "'");
    kv.emplace(std::string(text::trim(std::string_view(line).substr(0, eq))),
               std::string(text::trim(std::string_view(line).substr(eq + 1))));
  }
  auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(std::string("bank file: missing provenance key ") + key);
    return it->second;
  };

  channel::FiberSpec fiber;
  fiber.length_m = text::parse_real(get("fiber.length_m"), "fiber.length_m");
  fiber.n_avg = text::parse_real(get("fiber.n_avg"), "fiber.n_avg");
  fiber.delta_n = text::parse_real(get("fiber.delta_n"), "fiber.delta_n");
  fiber.mode_count = text::parse_int<int>(get("fiber.modes"), "fiber.modes");
  fiber.theta_spread_s = text::parse_real(get("fiber.theta_spread_s"), "fiber.theta_spread_s");
  fiber.rng_seed = text::parse_int<std::uint64_t>(get("fiber.rng_seed"), "fiber.rng_seed");
  channel::ReceiverSpec rx;
  rx.sample_rate_hz = text::parse_real(get("rx.sample_rate_hz"), "rx.sample_rate_hz");
  rx.symbol_period_s = text::parse_real(get("rx.symbol_period_s"), "rx.symbol_period_s");
  rx.pulse_width_s = text::parse_real(get("rx.pulse_width_s"), "rx.pulse_width_s");
  rx.snr_db = text::parse_real(get("rx.snr_db"), "rx.snr_db");
  rx.oversample = text::parse_int<int>(get("rx.oversample"), "rx.oversample");
  FrequencyAlphabet alphabet;
  alphabet.start_offset_hz = text::parse_real(get("alphabet.start_offset_hz"), "alphabet.start_offset_hz");
  alphabet.spacing_hz = text::parse_real(get("alphabet.spacing_hz"), "alphabet.spacing_hz");
  alphabet.size = text::parse_int<int>(get("alphabet.size"), "alphabet.size");
  const int core_count = text::parse_int<int>(get("cores"), "cores");

  if (alphabet.size != symbols || core_count != cores || rx.sample_rate_hz != rate ||
      rx.trace_length() != length) {
    throw ParseError("bank file: header disagrees with provenance block");
  }

  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(symbols) * static_cast<std::size_t>(cores) * length);
  for (int row = 0; row < symbols * cores; ++row) {
    if (!text::next_line(in, line)) throw ParseError("bank file: truncated sample block");
    const auto fields = text::split_ws(line);
    if (fields.size() != length) {
      throw ParseError("bank file: row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                       " samples, expected " + std::to_string(length));
    }
    for (auto f : fields) data.push_back(text::parse_real(f, "bank sample"));
  }
  try {
    return FingerprintBank(fiber, core_count, alphabet, rx, std::move(data));
  } catch (const InvalidParameter& e) {
    throw ParseError(std::string("bank file: ") + e.what());
  } catch (const GeometryError& e) {
    throw ParseError(std::string("bank file: ") + e.what());
  }
}

}  // namespace mmfcomm::codec
