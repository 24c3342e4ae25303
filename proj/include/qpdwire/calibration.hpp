#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "qpdwire/ensemble.hpp"

namespace qpdwire {

/// Entanglement fidelity estimate from all-zeros survival statistics:
///   F_hat = ((2^n + 1) / 2^n) P00_hat - 1 / 2^n.
/// F_hat is reported raw; it may exceed 1 or fall below 2^-n under sampling
/// noise, and plan construction performs the range rejection.
struct CalibrationResult {
  double p00_hat = 0.0;
  double f_hat = 0.0;
  long long shots = 0;
  double stderr_ = 0.0;
  std::string ensemble_label;
};

/// Samples an ensemble element per shot (pre-shared randomness model), sends
/// |0...0> through the twirled circuit and records the all-zeros outcome.
CalibrationResult calibrate(const Channel& c, const UnitaryEnsemble& e, long long shots,
                            std::uint64_t seed);

/// Analytic P00 from the twirled superoperator, mapped through the same
/// linear relation; equals chi_00 exactly when the twirl depolarizes.
double calibrate_exact(const Channel& c, const UnitaryEnsemble& e);

nlohmann::json calibration_to_json(const CalibrationResult& r);
std::string calibration_csv_header();
std::string calibration_csv_row(const CalibrationResult& r);

}  // namespace qpdwire
