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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qwork/sampling.hpp"
#include "qwork/spectral.hpp"
#include "qwork/work_povm.hpp"

namespace qwork {

/// Ancilla register of m_qubits qubits, D = 2^m_qubits readout bins.
class SamplerConfig {
 public:
  static constexpr int kMaxQubits = 24;

  SamplerConfig(int m_qubits, double e_max);

  int m_qubits() const { return m_qubits_; }
  std::uint64_t d() const { return std::uint64_t{1} << m_qubits_; }
  double e_max() const { return e_max_; }
  /// Work spacing between neighbouring readout bins, 4 e_max / D.
  double bin_width() const { return 4.0 * e_max_ / static_cast<double>(d()); }

 private:
  int m_qubits_;
  double e_max_;
};

/// Length-D probability table over ancilla outcomes x. Entries above -1e-12
/// are clamped to zero; the total must be 1 within 1e-9.
class CoarseGrainedDistribution {
 public:
  enum class Kind { filtered, rectangular };

  CoarseGrainedDistribution(Kind kind, std::vector<double> values, const SamplerConfig& config);

  Kind kind() const { return kind_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t x) const { return values_[x]; }
  const SamplerConfig& config() const { return config_; }
  std::uint64_t d() const { return config_.d(); }
  double e_max() const { return config_.e_max(); }

 private:
  Kind kind_;
  std::vector<double> values_;
  SamplerConfig config_;
};

/// Joint ancilla-system amplitudes, index x * system_dim + s.
class JointState {
 public:
  JointState(std::uint64_t ancilla_dim, Eigen::Index system_dim, std::vector<complex> amplitudes);

  std::uint64_t ancilla_dim() const { return ancilla_dim_; }
  Eigen::Index system_dim() const { return system_dim_; }
  std::span<const complex> amplitudes() const { return amplitudes_; }
  double norm() const;

  /// Probability of each ancilla outcome, summed over the system.
  std::vector<double> ancilla_marginal() const;

 private:
  std::uint64_t ancilla_dim_;
  Eigen::Index system_dim_;
  std::vector<complex> amplitudes_;
};

/// Work value read from outcome x: 4 e_max x / D for x <= D/2, and
/// 4 e_max (x - D) / D above.
double x_to_work(std::uint64_t x, const SamplerConfig& config);

/// Outcome whose half-open bin [w_x - 2 e_max/D, w_x + 2 e_max/D) holds w.
std::uint64_t work_to_bin(double w, const SamplerConfig& config);

/// |F_D(z)|^2 = sin^2(pi z D / 4E) / (D^2 sin^2(pi z / 4E)), with the limit
/// value 1 where |sin(pi z / 4E)| < 1e-12.
double filter_weight(double z, const SamplerConfig& config);

/// P_D(x) = sum_k p_k |F_D(4 e_max x / D - w_k)|^2.
CoarseGrainedDistribution convolve_distribution(const WorkDistribution& dist,
                                                const SamplerConfig& config);

/// P_cg(x): mass of the points falling in the half-open bin of x.
CoarseGrainedDistribution rectangular_coarse_grain(const WorkDistribution& dist,
                                                   const SamplerConfig& config);

/// Discrete Fourier kernel on the ancilla index of a joint state, scaled by
/// 1/sqrt(D). Forward: a'_t = sum_x e^{+2 pi i x t / D} a_x; inverse uses
/// the conjugate kernel.
JointState qft(const JointState& state, bool inverse);

/// Phase-estimation circuit on a pure system state, as an explicit
/// statevector. `step_norms[i]` is the joint norm after step i+1.
struct CircuitRun {
  JointState final_state;
  std::array<double, 6> step_norms;
};
CircuitRun run_pure_circuit(const QuenchProtocol& protocol, const CVector& psi,
                            const SamplerConfig& config);

/// Ancilla readout distribution of the six-step circuit.
///
/// Inputs commuting with H are split into a convex mixture of H eigenvectors
/// (diagonalising inside degenerate levels); pure inputs run directly. Any
/// other mixed state is rejected.
CoarseGrainedDistribution simulate_circuit(const QuenchProtocol& protocol,
                                           const DensityMatrix& initial,
                                           const SamplerConfig& config);

/// k outcomes drawn from the table, mapped through x_to_work.
WorkSampleSet sample(const CoarseGrainedDistribution& dist, std::size_t k, std::uint64_t seed,
                     std::string tag = "P_D");

/// k work values drawn from the exact point masses.
WorkSampleSet sample(const WorkDistribution& dist, std::size_t k, std::uint64_t seed,
                     std::string tag = "P");

double sup_norm_distance(const CoarseGrainedDistribution& a, const CoarseGrainedDistribution& b);
double l1_distance(const CoarseGrainedDistribution& a, const CoarseGrainedDistribution& b);

}  // namespace qwork
