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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qwork/pe_sampler.hpp"
#include "qwork/sampling.hpp"
#include "qwork/work_povm.hpp"

namespace qwork {

struct FreeEnergyEstimate {
  double delta_f_hat;
  double beta;
  std::size_t k;
  // Delta-method standard error; absent for a single sample.
  std::optional<double> std_error;
};

/// Jarzynski estimate -ln(mean exp(-beta w)) / beta, max-shifted, with
/// std_error = sd(exp(-beta w)) / (beta * mean * sqrt(K)).
FreeEnergyEstimate estimate_free_energy(std::span<const double> work, double beta);
FreeEnergyEstimate estimate_free_energy(const WorkSampleSet& samples, double beta);

/// sum_k p_k exp(-beta w_k).
double exact_exponential_average(const WorkDistribution& dist, double beta);

/// -ln(sum_k p_k exp(-beta w_k)) / beta; the K -> infinity limit of the estimator.
double exact_free_energy(const WorkDistribution& dist, double beta);

/// -ln(sum_x P(x) exp(-beta w_x)) / beta with w_x the readout bin centres.
double coarse_free_energy(const CoarseGrainedDistribution& dist, double beta);

/// sum_k p_k w_k^r for each requested order r >= 1.
std::vector<double> work_moments(const WorkDistribution& dist, std::span<const int> orders);

struct ConvergenceRow {
  std::size_t k;
  double df_exact_p;
  double df_pd;
  double stderr_exact_p;  // NaN when k == 1
  double stderr_pd;
  double df_true;
};

/// Free-energy estimates against sample count, from samples of the exact
/// P(w) and of the phase-estimation P_D(x). Each source draws one sample
/// stream of length max(k_grid) and row K uses its first K values.
/// df_true always comes from the partition functions.
std::vector<ConvergenceRow> convergence_curve(const QuenchProtocol& protocol,
                                              const SamplerConfig& config, double beta,
                                              std::span<const std::size_t> k_grid,
                                              std::uint64_t seed);

/// Same, for precomputed distributions (lets sweeps reuse P and P_D).
std::vector<ConvergenceRow> convergence_curve(const WorkDistribution& exact,
                                              const CoarseGrainedDistribution& filtered,
                                              double df_true, double beta,
                                              std::span<const std::size_t> k_grid,
                                              std::uint64_t seed);

/// Repeated-seed behaviour of the K-sample estimator on the exact P(w).
struct BiasDiagnostic {
  double df_true;
  double mean_estimate;
  double bias;              // mean_estimate - df_true
  double mean_std_error;    // average delta-method error
  double spread;            // standard deviation of the estimates over seeds
  double coverage;          // fraction of seeds with |estimate - df_true| <= 3 std_error
};

BiasDiagnostic sampling_bias(const WorkDistribution& exact, double df_true, double beta,
                             std::size_t k, std::size_t n_seeds, std::uint64_t first_seed);

}  // namespace qwork
