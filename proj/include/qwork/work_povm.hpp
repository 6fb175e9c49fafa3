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
#include <memory>
#include <span>
#include <vector>

#include "qwork/spectral.hpp"

namespace qwork {

/// Contiguous run [begin, end) of eigenvalue indices identified as one
/// (possibly degenerate) energy level.
struct LevelCluster {
  Eigen::Index begin;
  Eigen::Index end;
};

/// Every transition gap E~_m - E_n of a protocol, merged into ascending
/// groups. group_of(m, n) gives the index into `values`.
struct GapTable {
  std::vector<double> values;
  std::vector<std::uint32_t> group;  // row-major over (m, n)
  Eigen::Index dim = 0;

  std::uint32_t group_of(Eigen::Index m, Eigen::Index n) const {
    return group[static_cast<std::size_t>(m * dim + n)];
  }
  /// Index of the group whose value lies within `tolerance` of w, or -1.
  std::ptrdiff_t find(double w, double tolerance) const;
};

/// (H, H~, U_E, E_M) plus the derived spectra and transition amplitudes
/// <phi~_m|U_E|phi_n>, computed once at construction. Cheap to copy.
class QuenchProtocol {
 public:
  QuenchProtocol(HermitianOperator h_initial, HermitianOperator h_final, UnitaryMatrix drive,
                 double e_max);

  const HermitianOperator& h_initial() const { return state_->h_initial; }
  const HermitianOperator& h_final() const { return state_->h_final; }
  const UnitaryMatrix& drive() const { return state_->drive; }
  double e_max() const { return state_->e_max; }
  Eigen::Index dim() const { return state_->h_initial.dim(); }

  const SpectralDecomposition& initial_spectrum() const { return state_->initial; }
  const SpectralDecomposition& final_spectrum() const { return state_->final; }
  /// Row m, column n: <phi~_m| U_E |phi_n>.
  const CMatrix& transition_amplitudes() const { return state_->amplitudes; }
  const std::vector<LevelCluster>& initial_levels() const { return state_->initial_levels; }
  const GapTable& gaps() const { return state_->gaps; }

  /// Gaps closer than this are the same work value: 1e-9 * e_max.
  double merge_tolerance() const { return 1e-9 * state_->e_max; }

 private:
  struct State {
    HermitianOperator h_initial;
    HermitianOperator h_final;
    UnitaryMatrix drive;
    double e_max;
    SpectralDecomposition initial;
    SpectralDecomposition final;
    CMatrix amplitudes;
    std::vector<LevelCluster> initial_levels;
    GapTable gaps;
  };
  std::shared_ptr<const State> state_;
};

struct WorkPoint {
  double w;
  double p;
};

/// Point masses with strictly ascending w, positive p, total mass 1.
class WorkDistribution {
 public:
  /// `min_separation` is the smallest allowed spacing between consecutive w.
  explicit WorkDistribution(std::vector<WorkPoint> points, double min_separation = 0.0);

  std::span<const WorkPoint> points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  const WorkPoint& operator[](std::size_t i) const { return points_[i]; }

  /// ln sum_k p_k exp(-beta w_k), max-shifted.
  double log_exponential_average(double beta) const;

 private:
  std::vector<WorkPoint> points_;
};

/// Single-linkage grouping of ascending eigenvalues: neighbours closer than
/// `tolerance` share a cluster.
std::vector<LevelCluster> cluster_levels(const RVector& ascending, double tolerance);

/// Two-point-measurement work distribution of the protocol for initial state rho.
///
/// The first measurement is applied as the eigenspace projectors of H, so
/// coherences inside a degenerate H level contribute and the result does not
/// depend on the eigenvector gauge. Masses below 1e-15 are dropped.
WorkDistribution exact_work_distribution(const QuenchProtocol& protocol, const DensityMatrix& rho);

struct KrausTerm {
  Eigen::Index final_index;
  Eigen::Index initial_index;
  complex amplitude;
};

/// A_w = sum over its terms of amplitude * |phi~_m><phi_n|.
struct KrausOperator {
  double w;
  std::vector<KrausTerm> terms;  // sorted by (final_index, initial_index)
};

/// Work POVM in factored form. Operators are kept as eigenbasis terms and only
/// materialised on request, so large systems stay cheap.
class KrausSet {
 public:
  KrausSet(std::vector<KrausOperator> entries, SpectralDecomposition initial,
           SpectralDecomposition final);

  std::span<const KrausOperator> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  /// Dense A_w in the computational basis.
  CMatrix dense(std::size_t i) const;
  /// sum_w A_w^dagger A_w.
  CMatrix completeness() const;
  /// Tr(rho A_w^dagger A_w).
  double probability(std::size_t i, const DensityMatrix& rho) const;

 private:
  std::vector<KrausOperator> entries_;
  SpectralDecomposition initial_;
  SpectralDecomposition final_;
};

KrausSet kraus_operators(const QuenchProtocol& protocol);

struct PostMeasurement {
  DensityMatrix state;
  double probability;
};

/// A_w rho A_w^dagger / P(w) for a realisable gap w.
PostMeasurement post_measurement_state(const QuenchProtocol& protocol, const DensityMatrix& rho,
                                       double w);

struct JarzynskiCheck {
  double lhs;      // sum_k p_k exp(-beta w_k)
  double rhs;      // Z~ / Z
  double delta_f;  // -ln(rhs) / beta
};

JarzynskiCheck jarzynski_exact(const QuenchProtocol& protocol, double beta);

}  // namespace qwork
