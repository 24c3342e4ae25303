#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "qpdwire/calibration.hpp"
#include "qpdwire/qpd.hpp"

namespace qpdwire {

enum class ExperimentKind { error_scaling, swap_sweep, coeff_scan, verify };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

// Config for the experiment runner. Parsed strictly from JSON: a versioned
// schema field is required and unknown fields are rejected.
struct ExperimentConfig {
  int schema_version = 1;
  ExperimentKind kind = ExperimentKind::verify;
  int n = 1;
  std::uint64_t seed = 0;

  std::vector<double> fidelity_targets;
  std::vector<double> theta_targets;
  int num_states = 0;
  std::vector<std::string> observables;
  std::vector<long long> shot_grid;
  std::vector<std::string> ensembles;  // method labels; "direct" is the baseline
  long long calibration_shots = 0;

  // swap_sweep
  double per_swap_noise = 0.0;
  int swap_max = 0;

  // coeff_scan
  long long shots = 0;
  int coeff_grid_points = 101;

  int threads = 0;                  // 0 = hardware concurrency
  bool exact_shot_streams = false;  // draw every shot individually
  std::string shot_dump_path;       // optional; requires exact_shot_streams
  std::string output_path;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);
};

struct ResultRow {
  std::string method;
  double f_target = 0.0;
  double theta = 0.0;
  long long num_shots = 0;
  std::string observable;
  double mean_abs_error = 0.0;
  double stderr_of_mean = 0.0;
  int num_states = 0;
  std::uint64_t seed = 0;
};

struct SwapSweepRow {
  int k = 0;
  double f_hat = 0.0;
  double stderr_ = 0.0;
  double f_exact = 0.0;
  long long shots = 0;
  std::uint64_t seed = 0;
};

struct SwapSweepResult {
  std::vector<SwapSweepRow> rows;
  int first_k_below_half = -1;  // -1 when the threshold is never crossed
};

struct CoeffScanRow {
  std::string method;
  double f_target = 0.0;
  double theta = 0.0;
  std::string observable;
  double c = 0.0;
  double mean_abs_error = 0.0;
  int num_states = 0;
  std::uint64_t seed = 0;
};

struct CoeffScanSummary {
  std::string method;
  double f_target = 0.0;
  double theta = 0.0;
  std::string observable;
  double c_opt = 0.0;  // grid argmin of the mean error
  double c_com = 0.0;  // 1 / F_hat from calibration with the method's ensemble
};

struct CoeffScanResult {
  std::vector<CoeffScanRow> rows;
  std::vector<CoeffScanSummary> summaries;
};

/// One random channel per (F, theta) cell; estimates each method's error for
/// every state, observable and shot count. All methods in a cell reuse one
/// stored shot corpus, so comparisons are not artifacts of independent runs.
std::vector<ResultRow> run_error_scaling(const ExperimentConfig& cfg);

std::vector<ResultRow> run_error_scaling_from_shot_dump(const ExperimentConfig& cfg,
                                                        const std::string& dump_path);

SwapSweepResult run_swap_sweep(const ExperimentConfig& cfg);

/// Reprocesses one shot corpus per cell over a uniform grid of coefficients
/// c in [1, 2]; reports per-method argmin coefficients alongside 1 / F_hat.
CoeffScanResult run_coeff_scan(const ExperimentConfig& cfg);

struct VerifyItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyItem> items;
  bool all_passed() const;
};

/// Full invariant suite over every module; the release gate behind the
/// `verify` CLI command.
VerifyReport run_verify(std::uint64_t seed);

std::string result_rows_csv(const std::vector<ResultRow>& rows);
std::string swap_sweep_csv(const SwapSweepResult& result);
std::string coeff_scan_csv(const CoeffScanResult& result);
void write_text_file(const std::string& path, const std::string& content);

/// Deterministic shortest-round-trip double formatting used in every CSV.
std::string format_double(double value);

namespace verify_detail {
/// Pauli-mixing depolarization check with an injectable chi_00 perturbation
/// on the reference channel; the zero-perturbation form is part of
/// run_verify, the nonzero form exists for mutation tests.
VerifyItem pauli_mixing_depolarizes_check(std::uint64_t seed, double chi00_perturbation);
}  // namespace verify_detail

}  // namespace qpdwire
