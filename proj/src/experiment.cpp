#include "qpdwire/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qpdwire/noise.hpp"
#include "qpdwire/parallel.hpp"
#include "qpdwire/rng.hpp"

namespace qpdwire {

namespace {

constexpr std::uint64_t kChannelTag = 0x6368616eULL;
constexpr std::uint64_t kStateTag = 0x73746174ULL;
constexpr std::uint64_t kShotTag = 0x73747265ULL;
constexpr std::uint64_t kSweepTag = 0x73776565ULL;
constexpr std::uint64_t kScanCalibTag = 0x7363616cULL;

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed,
                const std::set<std::string>& required) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) {
      throw std::invalid_argument("config: unknown field '" + key + "'");
    }
  }
  for (const auto& key : required) {
    if (!j.contains(key)) {
      throw std::invalid_argument("config: missing required field '" + key + "'");
    }
  }
}

std::vector<std::string> known_method_labels() {
  return {"direct", "trivial", "pauli_mixing", "two_design"};
}

UnitaryEnsemble ensemble_for_method(const std::string& label) {
  if (label == "two_design") return UnitaryEnsemble::single_qubit_two_design();
  if (label == "pauli_mixing") return UnitaryEnsemble::single_qubit_pauli_mixing();
  if (label == "trivial" || label == "direct") return UnitaryEnsemble::trivial(1);
  throw std::invalid_argument("unknown method label: " + label);
}

// ---------------------------------------------------------------------------
// Shot corpus machinery.
//
// The single-qubit replication runs execute one core set of 15 circuits per
// cell: the 12 two-design channel circuits followed by the 3
// measure-and-prepare circuits. Every method consumes prefixes of the same
// per-circuit outcome streams.
// ---------------------------------------------------------------------------

struct Circuit {
  Matrix pre;
  Matrix post;
  bool mp;
};

std::vector<Circuit> single_qubit_circuit_corpus() {
  std::vector<Circuit> circuits;
  const auto td = UnitaryEnsemble::single_qubit_two_design();
  for (const auto& item : td.items()) {
    circuits.push_back({item.unitary, item.unitary.adjoint(), false});
  }
  const auto partition = commuting_partition(1);
  for (const Matrix& vj : partition.diagonalizers) {
    circuits.push_back({vj.adjoint(), vj, true});
  }
  return circuits;
}

struct MethodSpec {
  std::string label;
  bool is_direct = false;
  std::vector<int> channel_circuits;
  double channel_weight = 1.0;
};

MethodSpec method_spec(const std::string& label) {
  MethodSpec spec;
  spec.label = label;
  if (label == "two_design") {
    spec.channel_circuits = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    spec.channel_weight = 1.0 / 12.0;
  } else if (label == "pauli_mixing") {
    // The B = I slots of the two-design enumeration are exactly {I, HS, SH}.
    spec.channel_circuits = {0, 4, 8};
    spec.channel_weight = 1.0 / 3.0;
  } else if (label == "trivial") {
    spec.channel_circuits = {0};
    spec.channel_weight = 1.0;
  } else if (label == "direct") {
    spec.is_direct = true;
    spec.channel_circuits = {0};
    spec.channel_weight = 1.0;
  } else {
    throw std::invalid_argument("unknown method label: " + label);
  }
  return spec;
}

constexpr int kMpCircuitBase = 12;
constexpr int kNumCircuits = 15;
constexpr int kMpCircuitCount = 3;

// (circuit id, signed coefficient, sampling probability) triples of a method
// at decomposition coefficient c.
struct MethodAllocation {
  std::vector<int> circuits;
  std::vector<double> coefficients;
  std::vector<double> probabilities;
};

MethodAllocation method_allocation(const MethodSpec& spec, double c) {
  MethodAllocation alloc;
  if (spec.is_direct) {
    alloc.circuits = spec.channel_circuits;
    alloc.coefficients = {1.0};
    alloc.probabilities = {1.0};
    return alloc;
  }
  const double kappa = 2.0 * c - 1.0;
  for (int id : spec.channel_circuits) {
    alloc.circuits.push_back(id);
    alloc.coefficients.push_back(c * spec.channel_weight);
    alloc.probabilities.push_back(c * spec.channel_weight / kappa);
  }
  const double mp_weight = 1.0 / static_cast<double>(kMpCircuitCount);
  for (int j = 0; j < kMpCircuitCount; ++j) {
    alloc.circuits.push_back(kMpCircuitBase + j);
    alloc.coefficients.push_back(-(c - 1.0) * mp_weight);
    alloc.probabilities.push_back((c - 1.0) * mp_weight / kappa);
  }
  return alloc;
}

long long allocate_shots(double probability, long long total) {
  return static_cast<long long>(std::floor(probability * static_cast<double>(total)));
}

// One circuit's +-1 Bernoulli outcome stream, queried at ascending prefix
// lengths. With exact streams every shot is drawn individually; otherwise
// segment sums are drawn binomially, which has the identical joint
// distribution for the recorded prefix sums.
class PrefixSampler {
 public:
  PrefixSampler(std::mt19937_64 gen, double p_plus, bool exact, std::string* dump)
      : gen_(std::move(gen)), p_(p_plus), exact_(exact), dump_(dump) {}

  long long prefix_sum(long long length) {
    if (length < pos_) throw std::logic_error("PrefixSampler: lengths must be ascending");
    const long long segment = length - pos_;
    if (segment > 0) {
      if (exact_) {
        for (long long s = 0; s < segment; ++s) {
          const int m = rng::bernoulli(gen_, p_) ? 1 : -1;
          sum_ += m;
          if (dump_) {
            dump_->push_back(m > 0 ? '1' : '0');
          }
        }
      } else {
        std::binomial_distribution<long long> binom(segment, p_);
        const long long plus = binom(gen_);
        sum_ += 2 * plus - segment;
      }
      pos_ = length;
    }
    return sum_;
  }

 private:
  std::mt19937_64 gen_;
  double p_;
  bool exact_;
  std::string* dump_;
  long long pos_ = 0;
  long long sum_ = 0;
};

struct CellChannels {
  Channel channel;
  double f_used;
  double f_target;
  double theta;
};

std::vector<CellChannels> generate_cells(const ExperimentConfig& cfg) {
  std::vector<CellChannels> cells;
  for (std::size_t fi = 0; fi < cfg.fidelity_targets.size(); ++fi) {
    for (std::size_t ti = 0; ti < cfg.theta_targets.size(); ++ti) {
      auto gen = rng::stream(cfg.seed, {kChannelTag, fi, ti});
      auto targeted = random_channel_targeting(cfg.fidelity_targets[fi], cfg.theta_targets[ti], gen);
      const double f_used = entanglement_fidelity(targeted.channel);
      cells.push_back({std::move(targeted.channel), f_used, cfg.fidelity_targets[fi],
                       cfg.theta_targets[ti]});
    }
  }
  return cells;
}

// Per (cell, state): the 15 circuit output states for the cell's channel.
std::vector<Matrix> circuit_outputs(const std::vector<Circuit>& circuits, const Channel& channel,
                                    const Channel& mp, const Matrix& rho) {
  std::vector<Matrix> outs;
  outs.reserve(circuits.size());
  for (const auto& circ : circuits) {
    const Matrix in = circ.pre * rho * circ.pre.adjoint();
    const Matrix body = circ.mp ? mp.apply_matrix(in) : channel.apply_matrix(in);
    outs.push_back(circ.post * body * circ.post.adjoint());
  }
  return outs;
}

double estimate_from_sums(const MethodAllocation& alloc, long long total_shots,
                          const std::vector<std::vector<std::pair<long long, long long>>>& sums) {
  double estimate = 0.0;
  for (std::size_t i = 0; i < alloc.circuits.size(); ++i) {
    const long long n = allocate_shots(alloc.probabilities[i], total_shots);
    if (n == 0) continue;
    const auto& circuit_sums = sums[static_cast<std::size_t>(alloc.circuits[i])];
    const auto it = std::lower_bound(
        circuit_sums.begin(), circuit_sums.end(), std::make_pair(n, std::numeric_limits<long long>::min()));
    if (it == circuit_sums.end() || it->first != n) {
      throw std::logic_error("estimate_from_sums: missing checkpoint");
    }
    estimate += alloc.coefficients[i] * (static_cast<double>(it->second) / static_cast<double>(n));
  }
  return estimate;
}

struct AggregateStats {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

AggregateStats aggregate(const std::vector<double>& values) {
  AggregateStats stats;
  const std::size_t count = values.size();
  if (count == 0) return stats;
  double sum = 0.0;
  for (double v : values) sum += v;
  stats.mean = sum / static_cast<double>(count);
  if (count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - stats.mean) * (v - stats.mean);
    stats.stderr_of_mean = std::sqrt(ss / static_cast<double>(count - 1)) /
                           std::sqrt(static_cast<double>(count));
  }
  return stats;
}

void validate_common(const ExperimentConfig& cfg) {
  if (cfg.schema_version != 1) throw std::invalid_argument("config: unsupported schema_version");
  if (cfg.n != 1) throw std::invalid_argument("config: replication runs are fixed to n = 1");
}

void validate_replication_lists(const ExperimentConfig& cfg) {
  if (cfg.fidelity_targets.empty()) throw std::invalid_argument("config: empty fidelity_targets");
  if (cfg.theta_targets.empty()) throw std::invalid_argument("config: empty theta_targets");
  if (cfg.observables.empty()) throw std::invalid_argument("config: empty observables");
  if (cfg.ensembles.empty()) throw std::invalid_argument("config: empty ensembles");
  if (cfg.num_states < 1) throw std::invalid_argument("config: num_states must be >= 1");
  const auto known = known_method_labels();
  for (const auto& label : cfg.ensembles) {
    if (std::find(known.begin(), known.end(), label) == known.end()) {
      throw std::invalid_argument("config: unknown method label '" + label + "'");
    }
  }
  for (const auto& obs : cfg.observables) {
    PauliOperator::from_label(obs);  // validates
  }
  if (!cfg.shot_dump_path.empty() && !cfg.exact_shot_streams) {
    throw std::invalid_argument("config: shot_dump_path requires exact_shot_streams");
  }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::error_scaling: return "error_scaling";
    case ExperimentKind::swap_sweep: return "swap_sweep";
    case ExperimentKind::coeff_scan: return "coeff_scan";
    default: return "verify";
  }
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "error_scaling") return ExperimentKind::error_scaling;
  if (s == "swap_sweep") return ExperimentKind::swap_sweep;
  if (s == "coeff_scan") return ExperimentKind::coeff_scan;
  if (s == "verify") return ExperimentKind::verify;
  throw std::invalid_argument("unknown experiment kind: " + s);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  const std::set<std::string> base_allowed = {"schema_version", "kind", "n", "seed",
                                              "threads", "output_path"};
  if (!j.contains("kind")) throw std::invalid_argument("config: missing required field 'kind'");
  if (!j.contains("seed")) throw std::invalid_argument("config: missing required field 'seed'");

  ExperimentConfig cfg;
  cfg.kind = experiment_kind_from_string(j.at("kind").get<std::string>());

  std::set<std::string> allowed = base_allowed;
  std::set<std::string> required = {"schema_version", "kind", "seed", "n"};
  switch (cfg.kind) {
    case ExperimentKind::error_scaling:
      allowed.insert({"fidelity_targets", "theta_targets", "num_states", "observables",
                      "shot_grid", "ensembles", "exact_shot_streams", "shot_dump_path"});
      required.insert({"fidelity_targets", "theta_targets", "num_states", "observables",
                       "shot_grid", "ensembles"});
      break;
    case ExperimentKind::coeff_scan:
      allowed.insert({"fidelity_targets", "theta_targets", "num_states", "observables", "shots",
                      "coeff_grid_points", "ensembles", "calibration_shots", "exact_shot_streams"});
      required.insert({"fidelity_targets", "theta_targets", "num_states", "observables", "shots",
                       "ensembles", "calibration_shots"});
      break;
    case ExperimentKind::swap_sweep:
      allowed.insert({"per_swap_noise", "swap_max", "calibration_shots", "ensembles"});
      required.insert({"per_swap_noise", "swap_max", "calibration_shots", "ensembles"});
      break;
    case ExperimentKind::verify:
      break;
  }
  check_keys(j, allowed, required);

  cfg.schema_version = j.at("schema_version").get<int>();
  cfg.n = j.at("n").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
  if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
  if (j.contains("fidelity_targets")) cfg.fidelity_targets = j.at("fidelity_targets").get<std::vector<double>>();
  if (j.contains("theta_targets")) cfg.theta_targets = j.at("theta_targets").get<std::vector<double>>();
  if (j.contains("num_states")) cfg.num_states = j.at("num_states").get<int>();
  if (j.contains("observables")) cfg.observables = j.at("observables").get<std::vector<std::string>>();
  if (j.contains("shot_grid")) cfg.shot_grid = j.at("shot_grid").get<std::vector<long long>>();
  if (j.contains("ensembles")) cfg.ensembles = j.at("ensembles").get<std::vector<std::string>>();
  if (j.contains("calibration_shots")) cfg.calibration_shots = j.at("calibration_shots").get<long long>();
  if (j.contains("per_swap_noise")) cfg.per_swap_noise = j.at("per_swap_noise").get<double>();
  if (j.contains("swap_max")) cfg.swap_max = j.at("swap_max").get<int>();
  if (j.contains("shots")) cfg.shots = j.at("shots").get<long long>();
  if (j.contains("coeff_grid_points")) cfg.coeff_grid_points = j.at("coeff_grid_points").get<int>();
  if (j.contains("exact_shot_streams")) cfg.exact_shot_streams = j.at("exact_shot_streams").get<bool>();
  if (j.contains("shot_dump_path")) cfg.shot_dump_path = j.at("shot_dump_path").get<std::string>();

  if (cfg.schema_version != 1) throw std::invalid_argument("config: unsupported schema_version");
  if (cfg.kind == ExperimentKind::error_scaling) {
    for (std::size_t i = 1; i < cfg.shot_grid.size(); ++i) {
      if (cfg.shot_grid[i] <= cfg.shot_grid[i - 1]) {
        throw std::invalid_argument("config: shot_grid must be strictly increasing");
      }
    }
    if (cfg.shot_grid.empty()) throw std::invalid_argument("config: empty shot_grid");
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json j;
  in >> j;
  return from_json(j);
}

// ---------------------------------------------------------------------------
// Error scaling (simulation study replication).
// ---------------------------------------------------------------------------

namespace {

struct ErrorScalingEngineResult {
  // errors[(((cell * S + s) * O + o) * M + m) * NN + ni]
  std::vector<double> errors;
  std::vector<std::string> dumps;  // one chunk per job when dumping
};

ErrorScalingEngineResult error_scaling_engine(const ExperimentConfig& cfg,
                                              const std::vector<CellChannels>& cells,
                                              const std::vector<MethodSpec>& methods) {
  const auto circuits = single_qubit_circuit_corpus();
  const Channel mp = mp_channel(1).channel;

  const std::size_t num_cells = cells.size();
  const std::size_t S = static_cast<std::size_t>(cfg.num_states);
  const std::size_t O = cfg.observables.size();
  const std::size_t M = methods.size();
  const std::size_t NN = cfg.shot_grid.size();

  std::vector<PauliOperator> observables;
  observables.reserve(O);
  for (const auto& label : cfg.observables) observables.push_back(PauliOperator::from_label(label));

  // Per-cell method allocations at the cell's calibrated coefficient.
  std::vector<std::vector<MethodAllocation>> allocations(num_cells);
  for (std::size_t ci = 0; ci < num_cells; ++ci) {
    const double c = 1.0 / cells[ci].f_used;
    for (const auto& spec : methods) {
      allocations[ci].push_back(method_allocation(spec, c));
    }
  }

  ErrorScalingEngineResult result;
  result.errors.assign(num_cells * S * O * M * NN, 0.0);
  const bool dumping = !cfg.shot_dump_path.empty();
  if (dumping) result.dumps.assign(num_cells * S, std::string());

  const long long num_jobs = static_cast<long long>(num_cells * S);
  parallel_for(cfg.threads, num_jobs, [&](long long job) {
    const std::size_t ci = static_cast<std::size_t>(job) / S;
    const std::size_t si = static_cast<std::size_t>(job) % S;
    const auto& cell = cells[ci];

    auto state_gen = rng::stream(cfg.seed, {kStateTag, ci, si});
    const DensityMatrix psi = haar_random_state(1, state_gen);
    const auto outputs = circuit_outputs(circuits, cell.channel, mp, psi.matrix());

    std::string* dump = dumping ? &result.dumps[ci * S + si] : nullptr;
    std::ostringstream dump_rows;

    for (std::size_t oi = 0; oi < O; ++oi) {
      const Matrix obs = observables[oi].matrix();
      const double truth = psi.expectation(observables[oi]);

      // Checkpoints: every prefix length any method requests at any N.
      std::vector<std::vector<long long>> checkpoints(circuits.size());
      for (std::size_t mi = 0; mi < M; ++mi) {
        const auto& alloc = allocations[ci][mi];
        for (long long n_total : cfg.shot_grid) {
          for (std::size_t k = 0; k < alloc.circuits.size(); ++k) {
            const long long n = allocate_shots(alloc.probabilities[k], n_total);
            if (n > 0) checkpoints[static_cast<std::size_t>(alloc.circuits[k])].push_back(n);
          }
        }
      }

      std::vector<std::vector<std::pair<long long, long long>>> sums(circuits.size());
      for (std::size_t qi = 0; qi < circuits.size(); ++qi) {
        auto& cps = checkpoints[qi];
        if (cps.empty()) continue;
        std::sort(cps.begin(), cps.end());
        cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
        const double t = (obs * outputs[qi]).trace().real();
        const double p_plus = std::clamp(0.5 * (1.0 + t), 0.0, 1.0);
        std::string shot_chars;
        PrefixSampler sampler(rng::stream(cfg.seed, {kShotTag, ci, si, oi, qi}), p_plus,
                              cfg.exact_shot_streams, dump ? &shot_chars : nullptr);
        for (long long len : cps) {
          sums[qi].emplace_back(len, sampler.prefix_sum(len));
        }
        if (dump) {
          dump_rows << ci << ',' << si << ',' << oi << ',' << qi << ',' << shot_chars << '\n';
        }
      }

      for (std::size_t mi = 0; mi < M; ++mi) {
        const auto& alloc = allocations[ci][mi];
        for (std::size_t ni = 0; ni < NN; ++ni) {
          const double estimate = estimate_from_sums(alloc, cfg.shot_grid[ni], sums);
          const double err = std::abs(estimate - truth);
          result.errors[(((ci * S + si) * O + oi) * M + mi) * NN + ni] = err;
        }
      }
    }
    if (dump) *dump = dump_rows.str();
  });

  return result;
}

}  // namespace

std::vector<ResultRow> run_error_scaling(const ExperimentConfig& cfg) {
  if (cfg.kind != ExperimentKind::error_scaling) {
    throw std::invalid_argument("run_error_scaling: config kind mismatch");
  }
  validate_common(cfg);
  validate_replication_lists(cfg);

  const auto cells = generate_cells(cfg);
  std::vector<MethodSpec> methods;
  for (const auto& label : cfg.ensembles) methods.push_back(method_spec(label));

  const auto engine = error_scaling_engine(cfg, cells, methods);

  if (!cfg.shot_dump_path.empty()) {
    std::ofstream dump(cfg.shot_dump_path, std::ios::binary);
    if (!dump) throw std::runtime_error("cannot open shot dump path " + cfg.shot_dump_path);
    dump << "cell,state,observable,circuit,outcomes\n";
    for (const auto& chunk : engine.dumps) dump << chunk;
  }

  const std::size_t S = static_cast<std::size_t>(cfg.num_states);
  const std::size_t O = cfg.observables.size();
  const std::size_t M = methods.size();
  const std::size_t NN = cfg.shot_grid.size();

  std::vector<ResultRow> rows;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    for (std::size_t mi = 0; mi < M; ++mi) {
      for (std::size_t ni = 0; ni < NN; ++ni) {
        for (std::size_t oi = 0; oi < O; ++oi) {
          std::vector<double> values(S);
          for (std::size_t si = 0; si < S; ++si) {
            values[si] = engine.errors[(((ci * S + si) * O + oi) * M + mi) * NN + ni];
          }
          const auto stats = aggregate(values);
          ResultRow row;
          row.method = methods[mi].label;
          row.f_target = cells[ci].f_target;
          row.theta = cells[ci].theta;
          row.num_shots = cfg.shot_grid[ni];
          row.observable = cfg.observables[oi];
          row.mean_abs_error = stats.mean;
          row.stderr_of_mean = stats.stderr_of_mean;
          row.num_states = cfg.num_states;
          row.seed = cfg.seed;
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

std::vector<ResultRow> run_error_scaling_from_shot_dump(const ExperimentConfig& cfg,
                                                        const std::string& dump_path) {
  validate_common(cfg);
  validate_replication_lists(cfg);
  const auto cells = generate_cells(cfg);
  std::vector<MethodSpec> methods;
  for (const auto& label : cfg.ensembles) methods.push_back(method_spec(label));

  // outcome streams keyed by (cell, state, observable, circuit)
  std::map<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>, std::string> streams;
  {
    std::ifstream in(dump_path);
    if (!in) throw std::runtime_error("cannot open shot dump " + dump_path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> fields;
      std::size_t start = 0;
      for (int f = 0; f < 4; ++f) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) throw std::runtime_error("malformed shot dump line: " + line);
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
      }
      const std::size_t ci = std::stoul(fields[0]);
      const std::size_t si = std::stoul(fields[1]);
      const std::size_t oi = std::stoul(fields[2]);
      const std::size_t qi = std::stoul(fields[3]);
      streams[{ci, si, oi, qi}] = line.substr(start);
    }
  }

  const std::size_t S = static_cast<std::size_t>(cfg.num_states);
  const std::size_t O = cfg.observables.size();
  const std::size_t M = methods.size();
  const std::size_t NN = cfg.shot_grid.size();

  std::vector<std::vector<MethodAllocation>> allocations(cells.size());
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    const double c = 1.0 / cells[ci].f_used;
    for (const auto& spec : methods) allocations[ci].push_back(method_allocation(spec, c));
  }

  std::vector<PauliOperator> observables;
  for (const auto& label : cfg.observables) observables.push_back(PauliOperator::from_label(label));

  std::vector<double> errors(cells.size() * S * O * M * NN, 0.0);
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    for (std::size_t si = 0; si < S; ++si) {
      auto state_gen = rng::stream(cfg.seed, {kStateTag, ci, si});
      const DensityMatrix psi = haar_random_state(1, state_gen);
      for (std::size_t oi = 0; oi < O; ++oi) {
        const double truth = psi.expectation(observables[oi]);
        std::vector<std::vector<std::pair<long long, long long>>> sums(kNumCircuits);
        for (std::size_t qi = 0; qi < kNumCircuits; ++qi) {
          const auto it = streams.find({ci, si, oi, qi});
          if (it == streams.end()) continue;
          const std::string& chars = it->second;
          long long acc = 0;
          std::vector<std::pair<long long, long long>> prefix;
          prefix.reserve(chars.size());
          for (std::size_t pos = 0; pos < chars.size(); ++pos) {
            acc += chars[pos] == '1' ? 1 : -1;
            prefix.emplace_back(static_cast<long long>(pos) + 1, acc);
          }
          sums[qi] = std::move(prefix);
        }
        for (std::size_t mi = 0; mi < M; ++mi) {
          for (std::size_t ni = 0; ni < NN; ++ni) {
            const double estimate = estimate_from_sums(allocations[ci][mi], cfg.shot_grid[ni], sums);
            errors[(((ci * S + si) * O + oi) * M + mi) * NN + ni] = std::abs(estimate - truth);
          }
        }
      }
    }
  }

  std::vector<ResultRow> rows;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    for (std::size_t mi = 0; mi < M; ++mi) {
      for (std::size_t ni = 0; ni < NN; ++ni) {
        for (std::size_t oi = 0; oi < O; ++oi) {
          std::vector<double> values(S);
          for (std::size_t si = 0; si < S; ++si) {
            values[si] = errors[(((ci * S + si) * O + oi) * M + mi) * NN + ni];
          }
          const auto stats = aggregate(values);
          rows.push_back({methods[mi].label, cells[ci].f_target, cells[ci].theta, cfg.shot_grid[ni],
                          cfg.observables[oi], stats.mean, stats.stderr_of_mean, cfg.num_states,
                          cfg.seed});
        }
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// SWAP degradation sweep.
// ---------------------------------------------------------------------------

SwapSweepResult run_swap_sweep(const ExperimentConfig& cfg) {
  if (cfg.kind != ExperimentKind::swap_sweep) {
    throw std::invalid_argument("run_swap_sweep: config kind mismatch");
  }
  validate_common(cfg);
  if (cfg.ensembles.empty()) throw std::invalid_argument("config: empty ensembles");
  if (cfg.swap_max < 0) throw std::invalid_argument("config: swap_max must be nonnegative");
  if (cfg.calibration_shots < 1) throw std::invalid_argument("config: calibration_shots must be >= 1");
  const UnitaryEnsemble ensemble = ensemble_for_method(cfg.ensembles.front());

  SwapSweepResult result;
  result.rows.resize(static_cast<std::size_t>(cfg.swap_max) + 1);
  parallel_for(cfg.threads, cfg.swap_max + 1, [&](long long k) {
    const auto resource = swap_degraded_resource(static_cast<int>(k), cfg.per_swap_noise);
    const Channel chan = teleportation_channel(resource);
    const auto calib = calibrate(chan, ensemble, cfg.calibration_shots,
                                 rng::derive_key(cfg.seed, {kSweepTag, static_cast<std::uint64_t>(k)}));
    SwapSweepRow row;
    row.k = static_cast<int>(k);
    row.f_hat = calib.f_hat;
    row.stderr_ = calib.stderr_;
    row.f_exact = entanglement_fidelity(chan);
    row.shots = cfg.calibration_shots;
    row.seed = cfg.seed;
    result.rows[static_cast<std::size_t>(k)] = row;
  });

  for (const auto& row : result.rows) {
    if (row.f_hat < 0.5) {
      result.first_k_below_half = row.k;
      break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Coefficient scan.
// ---------------------------------------------------------------------------

CoeffScanResult run_coeff_scan(const ExperimentConfig& cfg) {
  if (cfg.kind != ExperimentKind::coeff_scan) {
    throw std::invalid_argument("run_coeff_scan: config kind mismatch");
  }
  validate_common(cfg);
  validate_replication_lists(cfg);
  if (cfg.shots < 1) throw std::invalid_argument("config: shots must be >= 1");
  if (cfg.coeff_grid_points < 2) throw std::invalid_argument("config: coeff_grid_points must be >= 2");
  if (cfg.calibration_shots < 1) throw std::invalid_argument("config: calibration_shots must be >= 1");

  std::vector<MethodSpec> methods;
  for (const auto& label : cfg.ensembles) {
    if (label == "direct") {
      throw std::invalid_argument("config: the direct baseline has no coefficient to scan");
    }
    methods.push_back(method_spec(label));
  }

  const auto cells = generate_cells(cfg);
  const auto circuits = single_qubit_circuit_corpus();
  const Channel mp = mp_channel(1).channel;

  const std::size_t num_cells = cells.size();
  const std::size_t S = static_cast<std::size_t>(cfg.num_states);
  const std::size_t O = cfg.observables.size();
  const std::size_t M = methods.size();
  const std::size_t G = static_cast<std::size_t>(cfg.coeff_grid_points);

  std::vector<double> grid(G);
  for (std::size_t gi = 0; gi < G; ++gi) {
    grid[gi] = 1.0 + static_cast<double>(gi) / static_cast<double>(G - 1);
  }

  std::vector<PauliOperator> observables;
  for (const auto& label : cfg.observables) observables.push_back(PauliOperator::from_label(label));

  // allocations[method][grid point]; shared across cells since c is scanned.
  std::vector<std::vector<MethodAllocation>> allocations(M);
  for (std::size_t mi = 0; mi < M; ++mi) {
    for (std::size_t gi = 0; gi < G; ++gi) {
      allocations[mi].push_back(method_allocation(methods[mi], grid[gi]));
    }
  }

  std::vector<double> errors(num_cells * S * O * M * G, 0.0);
  const long long num_jobs = static_cast<long long>(num_cells * S);
  parallel_for(cfg.threads, num_jobs, [&](long long job) {
    const std::size_t ci = static_cast<std::size_t>(job) / S;
    const std::size_t si = static_cast<std::size_t>(job) % S;
    auto state_gen = rng::stream(cfg.seed, {kStateTag, ci, si});
    const DensityMatrix psi = haar_random_state(1, state_gen);
    const auto outputs = circuit_outputs(circuits, cells[ci].channel, mp, psi.matrix());

    for (std::size_t oi = 0; oi < O; ++oi) {
      const Matrix obs = observables[oi].matrix();
      const double truth = psi.expectation(observables[oi]);

      std::vector<std::vector<long long>> checkpoints(circuits.size());
      for (std::size_t mi = 0; mi < M; ++mi) {
        for (std::size_t gi = 0; gi < G; ++gi) {
          const auto& alloc = allocations[mi][gi];
          for (std::size_t k = 0; k < alloc.circuits.size(); ++k) {
            const long long n = allocate_shots(alloc.probabilities[k], cfg.shots);
            if (n > 0) checkpoints[static_cast<std::size_t>(alloc.circuits[k])].push_back(n);
          }
        }
      }

      std::vector<std::vector<std::pair<long long, long long>>> sums(circuits.size());
      for (std::size_t qi = 0; qi < circuits.size(); ++qi) {
        auto& cps = checkpoints[qi];
        if (cps.empty()) continue;
        std::sort(cps.begin(), cps.end());
        cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
        const double t = (obs * outputs[qi]).trace().real();
        const double p_plus = std::clamp(0.5 * (1.0 + t), 0.0, 1.0);
        PrefixSampler sampler(rng::stream(cfg.seed, {kShotTag, ci, si, oi, qi}), p_plus,
                              cfg.exact_shot_streams, nullptr);
        for (long long len : cps) sums[qi].emplace_back(len, sampler.prefix_sum(len));
      }

      for (std::size_t mi = 0; mi < M; ++mi) {
        for (std::size_t gi = 0; gi < G; ++gi) {
          const double estimate = estimate_from_sums(allocations[mi][gi], cfg.shots, sums);
          errors[(((ci * S + si) * O + oi) * M + mi) * G + gi] = std::abs(estimate - truth);
        }
      }
    }
  });

  CoeffScanResult result;
  for (std::size_t ci = 0; ci < num_cells; ++ci) {
    for (std::size_t mi = 0; mi < M; ++mi) {
      const auto calib =
          calibrate(cells[ci].channel, ensemble_for_method(methods[mi].label), cfg.calibration_shots,
                    rng::derive_key(cfg.seed, {kScanCalibTag, ci, mi}));
      for (std::size_t oi = 0; oi < O; ++oi) {
        double best_error = 0.0;
        std::size_t best_gi = 0;
        for (std::size_t gi = 0; gi < G; ++gi) {
          std::vector<double> values(S);
          for (std::size_t si = 0; si < S; ++si) {
            values[si] = errors[(((ci * S + si) * O + oi) * M + mi) * G + gi];
          }
          const auto stats = aggregate(values);
          result.rows.push_back({methods[mi].label, cells[ci].f_target, cells[ci].theta,
                                 cfg.observables[oi], grid[gi], stats.mean, cfg.num_states,
                                 cfg.seed});
          if (gi == 0 || stats.mean < best_error) {
            best_error = stats.mean;
            best_gi = gi;
          }
        }
        result.summaries.push_back({methods[mi].label, cells[ci].f_target, cells[ci].theta,
                                    cfg.observables[oi], grid[best_gi], 1.0 / calib.f_hat});
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// CSV output.
// ---------------------------------------------------------------------------

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string result_rows_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out << "method,F_target,theta,N,observable,mean_abs_error,stderr_of_mean,num_states,seed\n";
  for (const auto& r : rows) {
    out << r.method << ',' << format_double(r.f_target) << ',' << format_double(r.theta) << ','
        << r.num_shots << ',' << r.observable << ',' << format_double(r.mean_abs_error) << ','
        << format_double(r.stderr_of_mean) << ',' << r.num_states << ',' << r.seed << '\n';
  }
  return out.str();
}

std::string swap_sweep_csv(const SwapSweepResult& result) {
  std::ostringstream out;
  out << "k,F_hat,stderr,F_exact,shots,seed\n";
  for (const auto& r : result.rows) {
    out << r.k << ',' << format_double(r.f_hat) << ',' << format_double(r.stderr_) << ','
        << format_double(r.f_exact) << ',' << r.shots << ',' << r.seed << '\n';
  }
  return out.str();
}

std::string coeff_scan_csv(const CoeffScanResult& result) {
  std::ostringstream out;
  out << "method,F_target,theta,observable,c,mean_abs_error,num_states,seed\n";
  for (const auto& r : result.rows) {
    out << r.method << ',' << format_double(r.f_target) << ',' << format_double(r.theta) << ','
        << r.observable << ',' << format_double(r.c) << ',' << format_double(r.mean_abs_error)
        << ',' << r.num_states << ',' << r.seed << '\n';
  }
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << content;
}

bool VerifyReport::all_passed() const {
  for (const auto& item : items) {
    if (!item.passed) return false;
  }
  return true;
}

}  // namespace qpdwire
