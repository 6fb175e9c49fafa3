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

#include "qwork/work_povm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <utility>

#include "qwork/errors.hpp"

namespace qwork {
namespace {

constexpr double kDroppedMass = 1e-15;
constexpr double kZeroAmplitudeSquared = 1e-30;

GapTable build_gap_table(const RVector& initial, const RVector& final, double tolerance) {
  const Eigen::Index dim = initial.size();
  const auto pairs = static_cast<std::size_t>(dim * dim);
  std::vector<std::pair<double, std::uint32_t>> gaps(pairs);
  for (Eigen::Index m = 0; m < dim; ++m) {
    for (Eigen::Index n = 0; n < dim; ++n) {
      const auto idx = static_cast<std::uint32_t>(m * dim + n);
      gaps[idx] = {final(m) - initial(n), idx};
    }
  }
  std::sort(gaps.begin(), gaps.end());

  GapTable table;
  table.dim = dim;
  table.group.resize(pairs);
  std::size_t start = 0;
  auto close_group = [&](std::size_t end) {
    double sum = 0.0;
    for (std::size_t i = start; i < end; ++i) sum += gaps[i].first;
    const auto id = static_cast<std::uint32_t>(table.values.size());
    table.values.push_back(sum / static_cast<double>(end - start));
    for (std::size_t i = start; i < end; ++i) table.group[gaps[i].second] = id;
    start = end;
  };
  for (std::size_t i = 1; i < pairs; ++i) {
    if (gaps[i].first - gaps[i - 1].first > tolerance) close_group(i);
  }
  close_group(pairs);
  return table;
}

void require_same_dim(const QuenchProtocol& protocol, const DensityMatrix& rho, const char* what) {
  if (rho.dim() != protocol.dim()) {
    std::ostringstream msg;
    msg << what << ": density matrix dim " << rho.dim() << " does not match protocol dim "
        << protocol.dim();
    throw ValidationError(msg.str());
  }
}

// Amplitudes of A_w in the (H~ eigenbasis) x (H eigenbasis) coordinates.
CMatrix eigen_coordinates(const KrausOperator& op, Eigen::Index dim) {
  CMatrix k = CMatrix::Zero(dim, dim);
  for (const auto& term : op.terms) k(term.final_index, term.initial_index) = term.amplitude;
  return k;
}

}  // namespace

std::ptrdiff_t GapTable::find(double w, double tolerance) const {
  auto it = std::lower_bound(values.begin(), values.end(), w - tolerance);
  if (it == values.end() || *it > w + tolerance) return -1;
  return it - values.begin();
}

std::vector<LevelCluster> cluster_levels(const RVector& ascending, double tolerance) {
  std::vector<LevelCluster> clusters;
  Eigen::Index begin = 0;
  for (Eigen::Index i = 1; i <= ascending.size(); ++i) {
    if (i == ascending.size() || ascending(i) - ascending(i - 1) > tolerance) {
      clusters.push_back({begin, i});
      begin = i;
    }
  }
  return clusters;
}

QuenchProtocol::QuenchProtocol(HermitianOperator h_initial, HermitianOperator h_final,
                               UnitaryMatrix drive, double e_max) {
  if (!(e_max > 0.0) || !std::isfinite(e_max)) {
    throw ValidationError("QuenchProtocol: e_max must be finite and > 0");
  }
  if (h_final.dim() != h_initial.dim() || drive.dim() != h_initial.dim()) {
    std::ostringstream msg;
    msg << "QuenchProtocol: dimension mismatch (H " << h_initial.dim() << ", H~ " << h_final.dim()
        << ", U_E " << drive.dim() << ")";
    throw ValidationError(msg.str());
  }
  SpectralDecomposition initial = eigendecompose(h_initial);
  SpectralDecomposition final = eigendecompose(h_final);
  if (!spectral_bound_check(initial.eigenvalues, e_max)) {
    throw ValidationError("QuenchProtocol: initial Hamiltonian spectrum exceeds [-e_max/2, e_max/2]");
  }
  if (!spectral_bound_check(final.eigenvalues, e_max)) {
    throw ValidationError("QuenchProtocol: final Hamiltonian spectrum exceeds [-e_max/2, e_max/2]");
  }
  const double tolerance = 1e-9 * e_max;
  CMatrix amplitudes = final.eigenvectors.adjoint() * drive.matrix() * initial.eigenvectors;
  auto levels = cluster_levels(initial.eigenvalues, tolerance);
  GapTable gaps = build_gap_table(initial.eigenvalues, final.eigenvalues, tolerance);
  state_ = std::make_shared<const State>(State{std::move(h_initial), std::move(h_final),
                                               std::move(drive), e_max, std::move(initial),
                                               std::move(final), std::move(amplitudes),
                                               std::move(levels), std::move(gaps)});
}

WorkDistribution::WorkDistribution(std::vector<WorkPoint> points, double min_separation)
    : points_(std::move(points)) {
  if (points_.empty()) throw ValidationError("WorkDistribution: no points");
  double total = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& [w, p] = points_[i];
    if (!std::isfinite(w) || !(p > 0.0) || !std::isfinite(p)) {
      std::ostringstream msg;
      msg << "WorkDistribution: invalid point " << i << " (w=" << w << ", p=" << p << ")";
      throw ValidationError(msg.str());
    }
    if (i > 0 && !(w - points_[i - 1].w > min_separation)) {
      std::ostringstream msg;
      msg << "WorkDistribution: work values not strictly ascending at point " << i;
      throw ValidationError(msg.str());
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kStructuralTolerance) {
    std::ostringstream msg;
    msg << "WorkDistribution: total mass " << total << " differs from 1";
    throw ValidationError(msg.str());
  }
}

double WorkDistribution::log_exponential_average(double beta) const {
  double peak = -std::numeric_limits<double>::infinity();
  for (const auto& [w, p] : points_) peak = std::max(peak, -beta * w);
  double sum = 0.0;
  for (const auto& [w, p] : points_) sum += p * std::exp(-beta * w - peak);
  return peak + std::log(sum);
}

WorkDistribution exact_work_distribution(const QuenchProtocol& protocol, const DensityMatrix& rho) {
  require_same_dim(protocol, rho, "exact_work_distribution");
  const CMatrix& v = protocol.initial_spectrum().eigenvectors;
  const CMatrix& amps = protocol.transition_amplitudes();
  const GapTable& gaps = protocol.gaps();
  const CMatrix rho_eigen = v.adjoint() * rho.matrix() * v;

  std::vector<double> mass(gaps.values.size(), 0.0);
  for (const auto& [begin, end] : protocol.initial_levels()) {
    const Eigen::Index width = end - begin;
    if (width == 1) {
      const double p_n = rho_eigen(begin, begin).real();
      for (Eigen::Index m = 0; m < amps.rows(); ++m) {
        mass[gaps.group_of(m, begin)] += std::norm(amps(m, begin)) * p_n;
      }
      continue;
    }
    // Degenerate level: diag(A_a rho_aa A_a^dagger) is gauge invariant.
    const auto block = amps.middleCols(begin, width);
    const CMatrix projected = block * rho_eigen.block(begin, begin, width, width);
    const RVector per_final = projected.cwiseProduct(block.conjugate()).rowwise().sum().real();
    for (Eigen::Index m = 0; m < amps.rows(); ++m) {
      mass[gaps.group_of(m, begin)] += per_final(m);
    }
  }

  std::vector<WorkPoint> points;
  for (std::size_t g = 0; g < mass.size(); ++g) {
    if (mass[g] >= kDroppedMass) points.push_back({gaps.values[g], mass[g]});
  }
  return WorkDistribution(std::move(points), protocol.merge_tolerance());
}

KrausSet::KrausSet(std::vector<KrausOperator> entries, SpectralDecomposition initial,
                   SpectralDecomposition final)
    : entries_(std::move(entries)), initial_(std::move(initial)), final_(std::move(final)) {}

CMatrix KrausSet::dense(std::size_t i) const {
  const CMatrix k = eigen_coordinates(entries_.at(i), initial_.eigenvectors.rows());
  return final_.eigenvectors * k * initial_.eigenvectors.adjoint();
}

CMatrix KrausSet::completeness() const {
  const Eigen::Index dim = initial_.eigenvectors.rows();
  CMatrix sum = CMatrix::Zero(dim, dim);
  // A^dagger A = V K^dagger K V^dagger, since the final basis is orthonormal.
  for (const auto& op : entries_) {
    const CMatrix k = eigen_coordinates(op, dim);
    sum.noalias() += k.adjoint() * k;
  }
  return initial_.eigenvectors * sum * initial_.eigenvectors.adjoint();
}

double KrausSet::probability(std::size_t i, const DensityMatrix& rho) const {
  const CMatrix& v = initial_.eigenvectors;
  if (rho.dim() != v.rows()) throw ValidationError("KrausSet::probability: dimension mismatch");
  const CMatrix rho_eigen = v.adjoint() * rho.matrix() * v;
  const auto& terms = entries_.at(i).terms;
  // (K rho K^dagger)_mm, summing term pairs that share the final index.
  double p = 0.0;
  std::size_t row_start = 0;
  while (row_start < terms.size()) {
    std::size_t row_end = row_start;
    while (row_end < terms.size() && terms[row_end].final_index == terms[row_start].final_index) {
      ++row_end;
    }
    complex acc = 0.0;
    for (std::size_t a = row_start; a < row_end; ++a) {
      for (std::size_t b = row_start; b < row_end; ++b) {
        acc += terms[a].amplitude * rho_eigen(terms[a].initial_index, terms[b].initial_index) *
               std::conj(terms[b].amplitude);
      }
    }
    p += acc.real();
    row_start = row_end;
  }
  return p;
}

KrausSet kraus_operators(const QuenchProtocol& protocol) {
  const CMatrix& amps = protocol.transition_amplitudes();
  const GapTable& gaps = protocol.gaps();
  std::vector<KrausOperator> by_group(gaps.values.size());
  for (std::size_t g = 0; g < by_group.size(); ++g) by_group[g].w = gaps.values[g];
  for (Eigen::Index m = 0; m < amps.rows(); ++m) {
    for (Eigen::Index n = 0; n < amps.cols(); ++n) {
      if (std::norm(amps(m, n)) < kZeroAmplitudeSquared) continue;
      by_group[gaps.group_of(m, n)].terms.push_back({m, n, amps(m, n)});
    }
  }
  std::vector<KrausOperator> entries;
  for (auto& op : by_group) {
    if (!op.terms.empty()) entries.push_back(std::move(op));
  }
  return KrausSet(std::move(entries), protocol.initial_spectrum(), protocol.final_spectrum());
}

PostMeasurement post_measurement_state(const QuenchProtocol& protocol, const DensityMatrix& rho,
                                       double w) {
  require_same_dim(protocol, rho, "post_measurement_state");
  const std::ptrdiff_t group = protocol.gaps().find(w, protocol.merge_tolerance());
  if (group < 0) {
    std::ostringstream msg;
    msg << "post_measurement_state: w = " << w << " is not a realizable gap of the protocol";
    throw ValidationError(msg.str());
  }
  const CMatrix& amps = protocol.transition_amplitudes();
  const GapTable& gaps = protocol.gaps();
  KrausOperator op{gaps.values[static_cast<std::size_t>(group)], {}};
  for (Eigen::Index m = 0; m < amps.rows(); ++m) {
    for (Eigen::Index n = 0; n < amps.cols(); ++n) {
      if (gaps.group_of(m, n) == static_cast<std::uint32_t>(group)) {
        op.terms.push_back({m, n, amps(m, n)});
      }
    }
  }
  const CMatrix k = eigen_coordinates(op, protocol.dim());
  const CMatrix a =
      protocol.final_spectrum().eigenvectors * k * protocol.initial_spectrum().eigenvectors.adjoint();
  const CMatrix unnormalised = a * rho.matrix() * a.adjoint();
  const double probability = unnormalised.trace().real();
  if (!(probability > 1e-14)) {
    std::ostringstream msg;
    msg << "post_measurement_state: zero-probability outcome w = " << w << " (P = " << probability
        << ")";
    throw NumericalError(msg.str());
  }
  return {DensityMatrix(unnormalised / probability), probability};
}

JarzynskiCheck jarzynski_exact(const QuenchProtocol& protocol, double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ValidationError("jarzynski_exact: beta must be finite and > 0");
  }
  const auto thermal = thermal_state(protocol.initial_spectrum(), beta);
  const WorkDistribution dist = exact_work_distribution(protocol, thermal.rho);
  const double log_ratio = log_partition_function(protocol.final_spectrum().eigenvalues, beta) -
                           thermal.log_partition_function;
  return {std::exp(dist.log_exponential_average(beta)), std::exp(log_ratio), -log_ratio / beta};
}

}  // namespace qwork
