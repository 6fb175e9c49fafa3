// Copyright 2026 The qwork Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qwork/cli.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "qwork/errors.hpp"
#include "qwork/estimators.hpp"
#include "qwork/parallel.hpp"
#include "qwork/pe_sampler.hpp"
#include "qwork/scenarios.hpp"
#include "qwork/serialization.hpp"
#include "qwork/work_povm.hpp"

namespace qwork::cli {
namespace {

// The circuit column of `compare` is only produced up to this many joint amplitudes.
constexpr std::uint64_t kCircuitColumnLimit = std::uint64_t{1} << 20;

struct RunConfig {
  std::string command;
  ScenarioSpec scenario;
  std::string scenario_name = "gue";
  int m_qubits = 5;
  int m_max = -1;  // compare sweep upper end; -1 means m_qubits + 3
  double beta = 1.0;
  std::vector<std::size_t> k_grid{100, 1000, 10000};
  std::size_t k = 10000;
  std::string output_dir = "qwork_out";
  std::size_t threads = 0;
};

void validate(RunConfig& config) {
  static const std::map<std::string, ScenarioSpec::Kind> kinds{
      {"gue", ScenarioSpec::Kind::gue},
      {"two-level-sg", ScenarioSpec::Kind::two_level_sg},
      {"custom", ScenarioSpec::Kind::custom}};
  const auto kind = kinds.find(config.scenario_name);
  if (kind == kinds.end()) {
    throw ValidationError("unknown scenario '" + config.scenario_name + "'");
  }
  config.scenario.kind = kind->second;
  if (config.scenario.kind == ScenarioSpec::Kind::custom &&
      (config.scenario.h_path.empty() || config.scenario.h_tilde_path.empty())) {
    throw ValidationError("scenario 'custom' requires --h and --h-tilde");
  }
  if (!(config.scenario.e_max > 0.0) || !std::isfinite(config.scenario.e_max)) {
    throw ValidationError("--e-max must be finite and > 0");
  }
  if (!(config.beta >= 0.0) || !std::isfinite(config.beta)) {
    throw ValidationError("--beta must be finite and >= 0");
  }
  if (config.command == "jarzynski" && !(config.beta > 0.0)) {
    throw ValidationError("jarzynski requires --beta > 0");
  }
  SamplerConfig(config.m_qubits, config.scenario.e_max);  // range check
  if (config.m_max < 0) config.m_max = std::min(config.m_qubits + 3, SamplerConfig::kMaxQubits);
  if (config.m_max < config.m_qubits || config.m_max > SamplerConfig::kMaxQubits) {
    throw ValidationError("--m-max must lie in [--m-qubits, 24]");
  }
  if (config.k < 1) throw ValidationError("--k must be >= 1");
  if (config.k_grid.empty()) throw ValidationError("--k-grid must not be empty");
  for (std::size_t i = 0; i < config.k_grid.size(); ++i) {
    if (config.k_grid[i] < 1 || (i > 0 && config.k_grid[i] <= config.k_grid[i - 1])) {
      throw ValidationError("--k-grid must be strictly ascending positive integers");
    }
  }
}

// '#' provenance lines shared by every CSV this tool writes.
std::string provenance(const RunConfig& config) {
  std::ostringstream out;
  out << "# command=" << config.command << "\n"
      << "# scenario=" << describe(config.scenario) << "\n"
      << "# seed=" << config.scenario.seed << "\n"
      << "# e_max=" << format_double(config.scenario.e_max) << "\n"
      << "# beta=" << format_double(config.beta) << "\n"
      << "# M=" << config.m_qubits << "\n";
  return out.str();
}

nlohmann::json provenance_json(const RunConfig& config) {
  return {{"command", config.command},
          {"scenario", describe(config.scenario)},
          {"seed", config.scenario.seed},
          {"e_max", config.scenario.e_max},
          {"beta", config.beta},
          {"m_qubits", config.m_qubits}};
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::filesystem::path output(const RunConfig& config, const char* name) {
  return std::filesystem::path(config.output_dir) / name;
}

WorkDistribution thermal_distribution(const QuenchProtocol& protocol, double beta) {
  return exact_work_distribution(protocol, thermal_state(protocol.initial_spectrum(), beta).rho);
}

void cmd_exact(const RunConfig& config, std::ostream& out) {
  const QuenchProtocol protocol = build_scenario(config.scenario);
  const auto initial = thermal_state(protocol.initial_spectrum(), config.beta);
  const auto final = thermal_state(protocol.final_spectrum(), config.beta);
  const WorkDistribution dist = exact_work_distribution(protocol, initial.rho);
  const std::vector<int> orders{1, 2, 3, 4};
  const auto moments = work_moments(dist, orders);

  nlohmann::json summary = provenance_json(config);
  summary["dim"] = protocol.dim();
  summary["support_size"] = dist.size();
  summary["moments"] = moments;
  summary["Z"] = finite_or_null(initial.partition_function);
  summary["Z_tilde"] = finite_or_null(final.partition_function);
  summary["log_Z"] = initial.log_partition_function;
  summary["log_Z_tilde"] = final.log_partition_function;
  if (config.beta > 0.0) {
    const auto check = jarzynski_exact(protocol, config.beta);
    summary["delta_f_exact"] = check.delta_f;
    summary["jarzynski_lhs"] = check.lhs;
    summary["jarzynski_rhs"] = check.rhs;
  } else {
    summary["delta_f_exact"] = nullptr;
  }

  write_file_atomic(output(config, "work_distribution.csv"),
                    provenance(config) + work_distribution_csv(dist));
  write_file_atomic(output(config, "work_distribution.json"),
                    work_distribution_json(dist).dump(2) + "\n");
  write_file_atomic(output(config, "exact_summary.json"), summary.dump(2) + "\n");
  out << "exact: " << dist.size() << " work values written to " << config.output_dir << "\n";
}

void cmd_compare(const RunConfig& config, std::ostream& out) {
  const QuenchProtocol protocol = build_scenario(config.scenario);
  const auto thermal = thermal_state(protocol.initial_spectrum(), config.beta);
  const WorkDistribution dist = exact_work_distribution(protocol, thermal.rho);
  const auto dim = static_cast<std::uint64_t>(protocol.dim());

  std::ostringstream sweep;
  sweep << provenance(config) << "M,D,sup_cg_vs_pd,l1_cg_vs_pd,sup_circuit_vs_convolution\n";
  nlohmann::json sweep_json = nlohmann::json::array();
  for (int m = config.m_qubits; m <= config.m_max; ++m) {
    const SamplerConfig sampler(m, config.scenario.e_max);
    const auto coarse = rectangular_coarse_grain(dist, sampler);
    const auto filtered = convolve_distribution(dist, sampler);
    std::optional<CoarseGrainedDistribution> circuit;
    if (dim * sampler.d() <= kCircuitColumnLimit) {
      circuit = simulate_circuit(protocol, thermal.rho, sampler);
    }
    const double sup = sup_norm_distance(coarse, filtered);
    const double l1 = l1_distance(coarse, filtered);
    const double circuit_gap =
        circuit ? sup_norm_distance(*circuit, filtered) : std::numeric_limits<double>::quiet_NaN();
    sweep << m << "," << sampler.d() << "," << format_double(sup) << "," << format_double(l1)
          << "," << (circuit ? format_double(circuit_gap) : std::string()) << "\n";
    sweep_json.push_back({{"M", m},
                          {"D", sampler.d()},
                          {"sup_cg_vs_pd", sup},
                          {"l1_cg_vs_pd", l1},
                          {"sup_circuit_vs_convolution", finite_or_null(circuit_gap)}});

    if (m != config.m_qubits) continue;
    std::ostringstream table;
    table << provenance(config) << "x,w,P_cg,P_D_convolution"
          << (circuit ? ",P_D_circuit" : "") << "\n";
    for (std::uint64_t x = 0; x < sampler.d(); ++x) {
      table << x << "," << format_double(x_to_work(x, sampler)) << ","
            << format_double(coarse[x]) << "," << format_double(filtered[x]);
      if (circuit) table << "," << format_double((*circuit)[x]);
      table << "\n";
    }
    write_file_atomic(output(config, "compare.csv"), table.str());
  }
  write_file_atomic(output(config, "compare_sweep.csv"), sweep.str());
  nlohmann::json summary = provenance_json(config);
  summary["dim"] = dim;
  summary["sweep"] = std::move(sweep_json);
  write_file_atomic(output(config, "compare_summary.json"), summary.dump(2) + "\n");
  out << "compare: M = " << config.m_qubits << ".." << config.m_max << " written to "
      << config.output_dir << "\n";
}

void cmd_jarzynski(const RunConfig& config, std::ostream& out) {
  const QuenchProtocol protocol = build_scenario(config.scenario);
  const SamplerConfig sampler(config.m_qubits, config.scenario.e_max);
  const auto rows =
      convergence_curve(protocol, sampler, config.beta, config.k_grid, config.scenario.seed);
  write_file_atomic(output(config, "convergence.csv"), provenance(config) + convergence_csv(rows));
  out << "jarzynski: exact dF = " << format_double(rows.front().df_true) << ", " << rows.size()
      << " rows written to " << config.output_dir << "\n";
}

void cmd_sample(const RunConfig& config, std::ostream& out) {
  const QuenchProtocol protocol = build_scenario(config.scenario);
  const SamplerConfig sampler(config.m_qubits, config.scenario.e_max);
  const auto filtered = convolve_distribution(
      thermal_distribution(protocol, config.beta), sampler);
  const WorkSampleSet samples = sample(filtered, config.k, config.scenario.seed,
                                       "P_D " + describe(config.scenario));
  std::ostringstream header;
  header << "# command=sample\n# beta=" << format_double(config.beta) << "\n";
  write_file_atomic(output(config, "samples.csv"), header.str() + samples_csv(samples));
  out << "sample: " << samples.k() << " samples written to " << config.output_dir << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Quantum work statistics: exact distributions, phase-estimation sampling and "
               "Jarzynski free-energy estimates"};
  // "--h" names the initial Hamiltonian, so help is long-form only.
  app.name("qwork");
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "TOML/INI file with option values (flags take precedence)");
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option("--scenario", config.scenario_name, "gue | two-level-sg | custom")
      ->capture_default_str();
  app.add_option("--n-qubits", config.scenario.n_qubits, "System qubits (gue)")
      ->capture_default_str();
  app.add_option("--m-qubits", config.m_qubits, "Ancilla qubits M (D = 2^M)")
      ->capture_default_str();
  app.add_option("--m-max", config.m_max, "Upper end of the compare M sweep (default M+3)");
  app.add_option("--e-max", config.scenario.e_max, "Spectral bound E_M")->capture_default_str();
  app.add_option("--beta", config.beta, "Inverse temperature of the initial thermal state")
      ->capture_default_str();
  app.add_option("--k-grid", config.k_grid, "Sample counts for jarzynski, ascending")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--k", config.k, "Sample count for sample")->capture_default_str();
  app.add_option("--seed", config.scenario.seed, "Master 64-bit seed")->capture_default_str();
  app.add_option("--out", config.output_dir, "Output directory")->capture_default_str();
  app.add_option("--h", config.scenario.h_path, "Initial Hamiltonian JSON (custom)");
  app.add_option("--h-tilde", config.scenario.h_tilde_path, "Final Hamiltonian JSON (custom)");
  app.add_option("--u", config.scenario.u_path, "Drive unitary JSON or 'identity' (custom)")
      ->capture_default_str();
  app.add_option("--theta", config.scenario.theta, "Drive rotation angle (two-level-sg)")
      ->capture_default_str();
  app.add_option("--omega1", config.scenario.omega1, "Initial splitting (two-level-sg)")
      ->capture_default_str();
  app.add_option("--omega2", config.scenario.omega2, "Final splitting (two-level-sg)")
      ->capture_default_str();
  app.add_option("--threads", config.threads, "Worker threads (0 = default)");

  app.add_subcommand("exact", "Exact work distribution and partition-function summary");
  app.add_subcommand("compare", "P_cg, P_D (convolution) and P_D (circuit) per readout bin");
  app.add_subcommand("jarzynski", "Free-energy convergence table against K");
  app.add_subcommand("sample", "Seeded work samples from P_D");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  config.command = app.get_subcommands().front()->get_name();
  try {
    validate(config);
    set_thread_count(config.threads);
    if (config.command == "exact") {
      cmd_exact(config, out);
    } else if (config.command == "compare") {
      cmd_compare(config, out);
    } else if (config.command == "jarzynski") {
      cmd_jarzynski(config, out);
    } else {
      cmd_sample(config, out);
    }
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace qwork::cli
