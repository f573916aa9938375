// Command-line front end for the experiment sweeps.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mmfcomm/mmfcomm.hpp"

namespace {

using namespace mmfcomm;
using harness::Experiment;

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& o, bool table_output) {
  cmd->add_option("--config", o.config, "flat key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "master seed (overrides config)");
  cmd->add_option("--workers", o.workers, "worker threads; results do not depend on it");
  cmd->add_option("--out", o.out, "output path (default: stdout)");
  if (table_output) cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

harness::SweepConfig resolve(Experiment e, const CommonOptions& o) {
  auto cfg = harness::preset(e);
  if (!o.config.empty()) cfg = harness::load_config_file(o.config, cfg);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  cfg.validate();
  return cfg;
}

void emit(const std::string& path, const std::string& body) {
  if (path.empty()) {
    std::cout << body;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << body;
}

std::string render(const harness::ResultTable& table, const std::string& format) {
  std::ostringstream s;
  if (format == "json") table.write_json(s); else table.write_csv(s);
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-encoded multimode-fiber link simulator"};
  app.require_subcommand(1);

  struct TableCommand {
    Experiment experiment;
    const char* name;
    const char* help;
    harness::ResultTable (*run)(const harness::SweepConfig&);
  };
  const TableCommand table_commands[] = {
      {Experiment::kSerSpacing, "ser-spacing", "symbol error rate vs frequency spacing", harness::run_ser_vs_spacing},
      {Experiment::kSerRate, "ser-rate", "per-core and fused symbol error rate vs sampling rate", harness::run_ser_vs_rate},
      {Experiment::kPam, "pam", "frequency and PAM level error rates vs SNR", harness::run_pam},
      {Experiment::kOffsets, "offsets", "error-offset histogram at a tuned high-error spacing", harness::run_offset_hist},
      {Experiment::kSemantic, "semantic", "classification error under semantic vs original ordering", harness::run_semantic},
  };

  CommonOptions common;
  std::vector<std::pair<CLI::App*, const TableCommand*>> table_apps;
  for (const auto& tc : table_commands) {
    auto* cmd = app.add_subcommand(tc.name, tc.help);
    add_common(cmd, common, true);
    table_apps.emplace_back(cmd, &tc);
  }

  auto* bank_cmd = app.add_subcommand("bank-build", "synthesize a channel and write its fingerprint bank");
  add_common(bank_cmd, common, false);

  std::string embeddings;
  int start = 0;
  auto* order_cmd = app.add_subcommand("order", "greedy semantic ordering of an embedding file");
  order_cmd->add_option("--embeddings", embeddings, "embedding file")->required()->check(CLI::ExistingFile);
  order_cmd->add_option("--start", start, "original index of the first token");
  order_cmd->add_option("--out", common.out, "permutation file (default: stdout)");

  double symbol_rate = 50e6, bits = 7, spacing = 600e3;
  int channels = 128;
  auto* eff_cmd = app.add_subcommand("eff", "spectral efficiency in bits/s/Hz");
  eff_cmd->add_option("--symbol-rate", symbol_rate, "symbols per second");
  eff_cmd->add_option("--bits", bits, "bits per symbol");
  eff_cmd->add_option("--spacing", spacing, "channel spacing in Hz");
  eff_cmd->add_option("--channels", channels, "number of frequency channels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  // Configuration stage.
  harness::SweepConfig cfg;
  const TableCommand* selected = nullptr;
  try {
    for (const auto& [cmd, tc] : table_apps) {
      if (cmd->parsed()) {
        selected = tc;
        cfg = resolve(tc->experiment, common);
      }
    }
    if (bank_cmd->parsed()) cfg = resolve(Experiment::kBankBuild, common);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (selected != nullptr) {
      emit(common.out, render(selected->run(cfg), common.format));
    } else if (bank_cmd->parsed()) {
      const auto channel = channel::synthesize_channel(cfg.fiber, cfg.cores);
      const auto bank = codec::build_bank(channel, cfg.alphabet, cfg.rx);
      std::ostringstream s;
      codec::write_bank(s, bank);
      emit(common.out, s.str());
    } else if (order_cmd->parsed()) {
      std::ifstream in(embeddings);
      std::ostringstream s;
      try {
        harness::run_order(in, start, s);
      } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitConfig;
      } catch (const InvalidParameter& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
      }
      emit(common.out, s.str());
    } else if (eff_cmd->parsed()) {
      double eta = 0.0;
      try {
        eta = codec::spectral_efficiency(symbol_rate, bits, spacing, channels);
      } catch (const InvalidParameter& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
      }
      std::printf("%.6f\n", eta);
    }
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
