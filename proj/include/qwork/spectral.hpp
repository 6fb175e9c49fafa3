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

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace qwork {

using complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermiticityTolerance = 1e-12;
inline constexpr double kStructuralTolerance = 1e-10;

/// A Hermitian matrix of dimension >= 2, in energy units.
///
/// Construction checks max|A - A^dagger| <= 1e-12 * max|A| and stores the
/// exactly Hermitian part (A + A^dagger) / 2.
class HermitianOperator {
 public:
  explicit HermitianOperator(CMatrix entries);

  Eigen::Index dim() const { return entries_.rows(); }
  const CMatrix& matrix() const { return entries_; }

  static HermitianOperator diagonal(const RVector& values);

 private:
  CMatrix entries_;
};

/// Unitary matrix; construction checks max|U^dagger U - I| <= 1e-10.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(CMatrix entries);

  Eigen::Index dim() const { return entries_.rows(); }
  const CMatrix& matrix() const { return entries_; }

  static UnitaryMatrix identity(Eigen::Index dim);

 private:
  CMatrix entries_;
};

/// Density matrix: Hermitian, unit trace, positive semidefinite (each within
/// the structural tolerances). Stored Hermitized.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMatrix entries);

  Eigen::Index dim() const { return entries_.rows(); }
  const CMatrix& matrix() const { return entries_; }

  /// |psi><psi| / <psi|psi>.
  static DensityMatrix pure(const CVector& psi);

 private:
  CMatrix entries_;
};

/// Eigenvalues in ascending order with eigenvectors as the columns of a
/// unitary matrix. Columns within a degenerate cluster carry an arbitrary
/// orthonormal gauge.
struct SpectralDecomposition {
  RVector eigenvalues;
  CMatrix eigenvectors;

  CMatrix reconstruct() const;
};

struct ThermalState {
  DensityMatrix rho;
  double partition_function;
  // ln Z, finite even when Z itself overflows.
  double log_partition_function;
};

SpectralDecomposition eigendecompose(const HermitianOperator& op);

/// exp(-i * op * t) through the spectral decomposition.
UnitaryMatrix propagator(const HermitianOperator& op, double t);
UnitaryMatrix propagator(const SpectralDecomposition& spectrum, double t);

/// exp(-beta op) / Z, evaluated in the eigenbasis with the smallest
/// eigenvalue subtracted before exponentiation.
ThermalState thermal_state(const HermitianOperator& op, double beta);
ThermalState thermal_state(const SpectralDecomposition& spectrum, double beta);

/// ln sum_n exp(-beta E_n), max-shifted.
double log_partition_function(const RVector& eigenvalues, double beta);

/// GUE draw (independent complex Gaussian entries, Hermitized) whose spectrum
/// is then mapped affinely onto [-e_max/2, +e_max/2]. Deterministic in seed.
HermitianOperator random_hamiltonian(Eigen::Index dim, double e_max, std::uint64_t seed);

/// Shift-and-scale helper: the affine image a*op + b*I whose spectrum spans
/// exactly [-e_max/2, +e_max/2]. Rejects operators with a single-point spectrum.
HermitianOperator fit_to_band(const HermitianOperator& op, double e_max);

/// True iff every eigenvalue lies in [-e_max/2, e_max/2] within 1e-12.
bool spectral_bound_check(const HermitianOperator& op, double e_max);
bool spectral_bound_check(const RVector& eigenvalues, double e_max);

/// Largest |entry| of a matrix; used for all max-norm tolerance checks.
double max_abs(const CMatrix& m);

}  // namespace qwork
