// Command-line front end: verify, calibrate, simulate, swap-sweep, coeff-scan.

#include <cstdint>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpdwire/experiment.hpp"
#include "qpdwire/noise.hpp"
#include "qpdwire/rng.hpp"

namespace {

using qpdwire::ExperimentConfig;
using qpdwire::ExperimentKind;

struct CommonOpts {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed_override = 0;
  bool has_seed_override = false;
  int threads = -1;
};

ExperimentConfig load_config(const CommonOpts& opts, ExperimentKind expected) {
  ExperimentConfig cfg = ExperimentConfig::load(opts.config_path);
  if (cfg.kind != expected) {
    throw std::invalid_argument("config kind is '" + to_string(cfg.kind) + "', expected '" +
                                to_string(expected) + "'");
  }
  if (opts.has_seed_override) cfg.seed = opts.seed_override;
  if (opts.threads >= 0) cfg.threads = opts.threads;
  if (!opts.out_path.empty()) cfg.output_path = opts.out_path;
  return cfg;
}

void add_common(CLI::App* sub, CommonOpts& opts, bool config_required = true) {
  auto* config = sub->add_option("--config", opts.config_path, "path to a JSON config");
  if (config_required) config->required();
  sub->add_option("--out", opts.out_path, "output CSV path (overrides config output_path)");
  sub->add_option("--seed", opts.seed_override, "seed override")
      ->each([&opts](const std::string&) { opts.has_seed_override = true; });
  sub->add_option("--threads", opts.threads, "worker count (0 = hardware concurrency)");
}

int run_verify_command(std::uint64_t seed) {
  const auto report = qpdwire::run_verify(seed);
  std::size_t width = 0;
  for (const auto& item : report.items) width = std::max(width, item.name.size());
  for (const auto& item : report.items) {
    std::cout << (item.passed ? "[PASS] " : "[FAIL] ") << item.name
              << std::string(width - item.name.size() + 2, ' ') << item.detail << "\n";
  }
  std::cout << (report.all_passed() ? "all checks passed\n" : "CHECKS FAILED\n");
  return report.all_passed() ? 0 : 1;
}

// Calibration config: {schema_version, kind:"calibrate", n, seed, shots,
// ensemble, and either channel_file or fidelity_target + theta_target}.
int run_calibrate_command(const CommonOpts& opts) {
  std::ifstream in(opts.config_path);
  if (!in) throw std::runtime_error("cannot open config " + opts.config_path);
  nlohmann::json j;
  in >> j;

  for (const auto& [key, value] : j.items()) {
    (void)value;
    static const std::set<std::string> allowed = {"schema_version", "kind",  "n",
                                                  "seed",           "shots", "ensemble",
                                                  "channel_file",   "fidelity_target",
                                                  "theta_target",   "output_path"};
    if (!allowed.count(key)) throw std::invalid_argument("config: unknown field '" + key + "'");
  }
  if (j.at("schema_version").get<int>() != 1) throw std::invalid_argument("unsupported schema_version");
  if (j.at("kind").get<std::string>() != "calibrate") {
    throw std::invalid_argument("config kind must be 'calibrate'");
  }
  std::uint64_t seed = j.at("seed").get<std::uint64_t>();
  if (opts.has_seed_override) seed = opts.seed_override;
  const long long shots = j.at("shots").get<long long>();
  const std::string ensemble_label = j.at("ensemble").get<std::string>();

  qpdwire::UnitaryEnsemble ensemble = [&] {
    if (ensemble_label == "two_design") return qpdwire::UnitaryEnsemble::single_qubit_two_design();
    if (ensemble_label == "pauli_mixing") return qpdwire::UnitaryEnsemble::single_qubit_pauli_mixing();
    if (ensemble_label == "trivial") return qpdwire::UnitaryEnsemble::trivial(j.at("n").get<int>());
    throw std::invalid_argument("unknown ensemble '" + ensemble_label + "'");
  }();

  qpdwire::Channel channel = [&] {
    if (j.contains("channel_file")) {
      std::ifstream cf(j.at("channel_file").get<std::string>());
      if (!cf) throw std::runtime_error("cannot open channel file");
      nlohmann::json cj;
      cf >> cj;
      return qpdwire::channel_from_json(cj);
    }
    auto gen = qpdwire::rng::stream(seed, {0x63616c63ULL});
    return qpdwire::random_channel_targeting(j.at("fidelity_target").get<double>(),
                                             j.at("theta_target").get<double>(), gen)
        .channel;
  }();

  const auto result = qpdwire::calibrate(channel, ensemble, shots, seed);
  std::cout << qpdwire::calibration_to_json(result).dump(2) << "\n";
  std::string out_path = opts.out_path;
  if (out_path.empty() && j.contains("output_path")) out_path = j.at("output_path").get<std::string>();
  if (!out_path.empty()) {
    qpdwire::write_text_file(out_path, qpdwire::calibration_csv_header() + "\n" +
                                           qpdwire::calibration_csv_row(result) + "\n");
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasiprobability simulation of ideal state transfer over noisy interconnects"};
  app.require_subcommand(1);

  auto* verify_cmd = app.add_subcommand("verify", "run the full invariant suite");
  std::uint64_t verify_seed = 20240901;
  verify_cmd->add_option("--seed", verify_seed, "seed for randomized checks");

  CommonOpts calibrate_opts;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "estimate entanglement fidelity");
  add_common(calibrate_cmd, calibrate_opts);

  CommonOpts simulate_opts;
  auto* simulate_cmd = app.add_subcommand("simulate", "error-scaling simulation study");
  add_common(simulate_cmd, simulate_opts);

  CommonOpts sweep_opts;
  auto* sweep_cmd = app.add_subcommand("swap-sweep", "fidelity vs SWAP count sweep");
  add_common(sweep_cmd, sweep_opts);

  CommonOpts scan_opts;
  auto* scan_cmd = app.add_subcommand("coeff-scan", "error vs decomposition coefficient scan");
  add_common(scan_cmd, scan_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify_cmd->parsed()) {
      return run_verify_command(verify_seed);
    }
    if (calibrate_cmd->parsed()) {
      return run_calibrate_command(calibrate_opts);
    }
    if (simulate_cmd->parsed()) {
      const auto cfg = load_config(simulate_opts, ExperimentKind::error_scaling);
      const auto rows = qpdwire::run_error_scaling(cfg);
      const std::string csv = qpdwire::result_rows_csv(rows);
      if (cfg.output_path.empty()) {
        std::cout << csv;
      } else {
        qpdwire::write_text_file(cfg.output_path, csv);
        std::cout << "wrote " << rows.size() << " rows to " << cfg.output_path << "\n";
      }
      return 0;
    }
    if (sweep_cmd->parsed()) {
      const auto cfg = load_config(sweep_opts, ExperimentKind::swap_sweep);
      const auto result = qpdwire::run_swap_sweep(cfg);
      const std::string csv = qpdwire::swap_sweep_csv(result);
      if (cfg.output_path.empty()) {
        std::cout << csv;
      } else {
        qpdwire::write_text_file(cfg.output_path, csv);
        std::cout << "wrote " << result.rows.size() << " rows to " << cfg.output_path << "\n";
      }
      if (result.first_k_below_half >= 0) {
        std::cout << "fidelity drops below 0.5 at k = " << result.first_k_below_half << "\n";
      } else {
        std::cout << "fidelity stayed at or above 0.5 for the whole sweep\n";
      }
      return 0;
    }
    if (scan_cmd->parsed()) {
      const auto cfg = load_config(scan_opts, ExperimentKind::coeff_scan);
      const auto result = qpdwire::run_coeff_scan(cfg);
      const std::string csv = qpdwire::coeff_scan_csv(result);
      if (cfg.output_path.empty()) {
        std::cout << csv;
      } else {
        qpdwire::write_text_file(cfg.output_path, csv);
        std::cout << "wrote " << result.rows.size() << " rows to " << cfg.output_path << "\n";
      }
      for (const auto& s : result.summaries) {
        std::cout << s.method << " F=" << s.f_target << " theta=" << s.theta << " obs="
                  << s.observable << ": c_opt = " << s.c_opt << ", c_com = " << s.c_com << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
