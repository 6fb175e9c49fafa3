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

#include "qwork/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qwork/errors.hpp"
#include "qwork/parallel.hpp"

namespace qwork {
namespace {

void require_positive_beta(double beta, const char* what) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ValidationError(std::string(what) + ": beta must be finite and > 0");
  }
}

void require_ascending(std::span<const std::size_t> k_grid) {
  if (k_grid.empty()) throw ValidationError("convergence_curve: empty K grid");
  if (k_grid.front() < 1) throw ValidationError("convergence_curve: K values must be >= 1");
  for (std::size_t i = 1; i < k_grid.size(); ++i) {
    if (k_grid[i] <= k_grid[i - 1]) {
      throw ValidationError("convergence_curve: K grid must be strictly ascending");
    }
  }
}

}  // namespace

FreeEnergyEstimate estimate_free_energy(std::span<const double> work, double beta) {
  require_positive_beta(beta, "estimate_free_energy");
  if (work.empty()) throw ValidationError("estimate_free_energy: no samples");
  const std::size_t k = work.size();
  // exp(-beta w) = exp(peak) * exp(-beta w - peak) keeps every term in (0, 1].
  double peak = -std::numeric_limits<double>::infinity();
  for (double w : work) peak = std::max(peak, -beta * w);
  double sum = 0.0;
  for (double w : work) sum += std::exp(-beta * w - peak);
  const double mean = sum / static_cast<double>(k);
  const double delta_f = -(peak + std::log(mean)) / beta;
  if (!std::isfinite(delta_f)) throw NumericalError("estimate_free_energy: non-finite estimate");

  FreeEnergyEstimate out{delta_f, beta, k, std::nullopt};
  if (k >= 2) {
    double squares = 0.0;
    for (double w : work) {
      const double dev = std::exp(-beta * w - peak) - mean;
      squares += dev * dev;
    }
    const double sd = std::sqrt(squares / static_cast<double>(k - 1));
    out.std_error = sd / (beta * mean * std::sqrt(static_cast<double>(k)));
  }
  return out;
}

FreeEnergyEstimate estimate_free_energy(const WorkSampleSet& samples, double beta) {
  return estimate_free_energy(std::span<const double>(samples.samples), beta);
}

double exact_exponential_average(const WorkDistribution& dist, double beta) {
  require_positive_beta(beta, "exact_exponential_average");
  return std::exp(dist.log_exponential_average(beta));
}

double exact_free_energy(const WorkDistribution& dist, double beta) {
  require_positive_beta(beta, "exact_free_energy");
  return -dist.log_exponential_average(beta) / beta;
}

double coarse_free_energy(const CoarseGrainedDistribution& dist, double beta) {
  require_positive_beta(beta, "coarse_free_energy");
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < dist.d(); ++x) {
    if (dist[x] > 0.0) peak = std::max(peak, -beta * x_to_work(x, dist.config()));
  }
  double sum = 0.0;
  for (std::size_t x = 0; x < dist.d(); ++x) {
    if (dist[x] > 0.0) sum += dist[x] * std::exp(-beta * x_to_work(x, dist.config()) - peak);
  }
  return -(peak + std::log(sum)) / beta;
}

std::vector<double> work_moments(const WorkDistribution& dist, std::span<const int> orders) {
  std::vector<double> moments;
  moments.reserve(orders.size());
  for (int r : orders) {
    if (r < 1) throw ValidationError("work_moments: orders must be >= 1");
    double sum = 0.0;
    for (const auto& [w, p] : dist.points()) sum += p * std::pow(w, r);
    moments.push_back(sum);
  }
  return moments;
}

std::vector<ConvergenceRow> convergence_curve(const WorkDistribution& exact,
                                              const CoarseGrainedDistribution& filtered,
                                              double df_true, double beta,
                                              std::span<const std::size_t> k_grid,
                                              std::uint64_t seed) {
  require_positive_beta(beta, "convergence_curve");
  require_ascending(k_grid);
  const std::size_t k_max = k_grid.back();
  const WorkSampleSet from_exact = sample(exact, k_max, seed);
  const WorkSampleSet from_filtered = sample(filtered, k_max, seed);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  std::vector<ConvergenceRow> rows;
  rows.reserve(k_grid.size());
  for (std::size_t k : k_grid) {
    const auto a = estimate_free_energy(std::span(from_exact.samples).first(k), beta);
    const auto b = estimate_free_energy(std::span(from_filtered.samples).first(k), beta);
    rows.push_back({k, a.delta_f_hat, b.delta_f_hat, a.std_error.value_or(nan),
                    b.std_error.value_or(nan), df_true});
  }
  return rows;
}

std::vector<ConvergenceRow> convergence_curve(const QuenchProtocol& protocol,
                                              const SamplerConfig& config, double beta,
                                              std::span<const std::size_t> k_grid,
                                              std::uint64_t seed) {
  require_positive_beta(beta, "convergence_curve");
  require_ascending(k_grid);
  const auto check = jarzynski_exact(protocol, beta);
  const auto thermal = thermal_state(protocol.initial_spectrum(), beta);
  const WorkDistribution exact = exact_work_distribution(protocol, thermal.rho);
  const CoarseGrainedDistribution filtered = convolve_distribution(exact, config);
  return convergence_curve(exact, filtered, check.delta_f, beta, k_grid, seed);
}

BiasDiagnostic sampling_bias(const WorkDistribution& exact, double df_true, double beta,
                             std::size_t k, std::size_t n_seeds, std::uint64_t first_seed) {
  require_positive_beta(beta, "sampling_bias");
  if (k < 2 || n_seeds < 2) throw ValidationError("sampling_bias: need k >= 2 and n_seeds >= 2");
  std::vector<FreeEnergyEstimate> estimates(n_seeds, FreeEnergyEstimate{0, beta, k, 0.0});
  parallel_for(n_seeds, [&](std::size_t i) {
    estimates[i] = estimate_free_energy(sample(exact, k, first_seed + i), beta);
  });
  double sum = 0.0;
  double err_sum = 0.0;
  std::size_t covered = 0;
  for (const auto& e : estimates) {
    sum += e.delta_f_hat;
    err_sum += *e.std_error;
    if (std::abs(e.delta_f_hat - df_true) <= 3.0 * *e.std_error) ++covered;
  }
  const double n = static_cast<double>(n_seeds);
  const double mean = sum / n;
  double squares = 0.0;
  for (const auto& e : estimates) squares += (e.delta_f_hat - mean) * (e.delta_f_hat - mean);
  return {df_true,       mean,
          mean - df_true, err_sum / n,
          std::sqrt(squares / (n - 1.0)), static_cast<double>(covered) / n};
}

}  // namespace qwork
