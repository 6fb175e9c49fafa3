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

#include "qwork/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qwork/errors.hpp"

namespace qwork {
namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream msg;
    msg << what << ": matrix must be square, got " << m.rows() << "x" << m.cols();
    throw ValidationError(msg.str());
  }
  if (m.rows() < 1) throw ValidationError(std::string(what) + ": empty matrix");
  if (!m.allFinite()) throw ValidationError(std::string(what) + ": non-finite entry");
}

// Checks Hermiticity against `tolerance` and returns the Hermitian part.
CMatrix hermitize(const CMatrix& m, double tolerance, const char* what) {
  Eigen::Index worst_r = 0;
  Eigen::Index worst_c = 0;
  const double deviation = (m - m.adjoint()).cwiseAbs().maxCoeff(&worst_r, &worst_c);
  if (deviation > tolerance) {
    std::ostringstream msg;
    msg << what << ": not Hermitian, |A(" << worst_r << "," << worst_c << ") - conj(A("
        << worst_c << "," << worst_r << "))| = " << deviation << " exceeds tolerance "
        << tolerance;
    throw ValidationError(msg.str());
  }
  return (m + m.adjoint()) * 0.5;
}

}  // namespace

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

HermitianOperator::HermitianOperator(CMatrix entries) {
  require_square(entries, "HermitianOperator");
  if (entries.rows() < 2) throw ValidationError("HermitianOperator: dim must be >= 2");
  const double scale = max_abs(entries);
  entries_ = hermitize(entries, kHermiticityTolerance * scale, "HermitianOperator");
}

HermitianOperator HermitianOperator::diagonal(const RVector& values) {
  return HermitianOperator(values.cast<complex>().asDiagonal().toDenseMatrix());
}

UnitaryMatrix::UnitaryMatrix(CMatrix entries) {
  require_square(entries, "UnitaryMatrix");
  const auto n = entries.rows();
  const double deviation = max_abs(entries.adjoint() * entries - CMatrix::Identity(n, n));
  if (deviation > kStructuralTolerance) {
    std::ostringstream msg;
    msg << "UnitaryMatrix: max|U^dagger U - I| = " << deviation << " exceeds "
        << kStructuralTolerance;
    throw ValidationError(msg.str());
  }
  entries_ = std::move(entries);
}

UnitaryMatrix UnitaryMatrix::identity(Eigen::Index dim) {
  return UnitaryMatrix(CMatrix::Identity(dim, dim));
}

DensityMatrix::DensityMatrix(CMatrix entries) {
  require_square(entries, "DensityMatrix");
  CMatrix rho = hermitize(entries, kHermiticityTolerance, "DensityMatrix");
  const double trace = rho.trace().real();
  if (std::abs(trace - 1.0) > kStructuralTolerance) {
    std::ostringstream msg;
    msg << "DensityMatrix: trace " << trace << " differs from 1";
    throw ValidationError(msg.str());
  }
  // rho + 1e-10 I admits a Cholesky factor iff min eigenvalue > -1e-10.
  const auto n = rho.rows();
  Eigen::LLT<CMatrix> llt(rho + kStructuralTolerance * CMatrix::Identity(n, n));
  if (llt.info() != Eigen::Success) {
    throw ValidationError("DensityMatrix: not positive semidefinite (eigenvalue below -1e-10)");
  }
  entries_ = std::move(rho);
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ValidationError("DensityMatrix::pure: state vector has zero or non-finite norm");
  }
  const CVector unit = psi / norm;
  return DensityMatrix(unit * unit.adjoint());
}

CMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<complex>().asDiagonal() * eigenvectors.adjoint();
}

SpectralDecomposition eigendecompose(const HermitianOperator& op) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(op.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigendecompose: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

UnitaryMatrix propagator(const SpectralDecomposition& spectrum, double t) {
  const CVector phases = (spectrum.eigenvalues * (-t)).unaryExpr(
      [](double angle) { return std::polar(1.0, angle); });
  const CMatrix& v = spectrum.eigenvectors;
  return UnitaryMatrix(v * phases.asDiagonal() * v.adjoint());
}

UnitaryMatrix propagator(const HermitianOperator& op, double t) {
  if (t == 0.0) return UnitaryMatrix::identity(op.dim());
  return propagator(eigendecompose(op), t);
}

double log_partition_function(const RVector& eigenvalues, double beta) {
  const double e_min = eigenvalues.minCoeff();
  double sum = 0.0;
  for (double e : eigenvalues) sum += std::exp(-beta * (e - e_min));
  return -beta * e_min + std::log(sum);
}

ThermalState thermal_state(const SpectralDecomposition& spectrum, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ValidationError("thermal_state: beta must be finite and >= 0");
  }
  const RVector& e = spectrum.eigenvalues;
  const double e_min = e.minCoeff();
  RVector weights = (-beta * (e.array() - e_min)).exp().matrix();
  const double shifted_sum = weights.sum();
  weights /= shifted_sum;
  const CMatrix& v = spectrum.eigenvectors;
  DensityMatrix rho(v * weights.cast<complex>().asDiagonal() * v.adjoint());
  const double log_z = -beta * e_min + std::log(shifted_sum);
  return {std::move(rho), std::exp(log_z), log_z};
}

ThermalState thermal_state(const HermitianOperator& op, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ValidationError("thermal_state: beta must be finite and >= 0");
  }
  return thermal_state(eigendecompose(op), beta);
}

HermitianOperator fit_to_band(const HermitianOperator& op, double e_max) {
  if (!(e_max > 0.0)) throw ValidationError("fit_to_band: e_max must be > 0");
  // The map is affine, so only the extreme eigenvalues are needed.
  const Eigen::SelfAdjointEigenSolver<CMatrix> solver(op.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("fit_to_band: eigensolver failed");
  const RVector& e = solver.eigenvalues();
  const double lo = e(0);
  const double hi = e(e.size() - 1);
  if (!(hi - lo > 0.0)) {
    throw ValidationError("fit_to_band: spectrum is a single point, cannot be stretched");
  }
  const double scale = e_max / (hi - lo);
  const double shift = -0.5 * (hi + lo) * scale;
  CMatrix fitted = op.matrix() * scale;
  fitted.diagonal().array() += shift;
  return HermitianOperator(fitted);
}

HermitianOperator random_hamiltonian(Eigen::Index dim, double e_max, std::uint64_t seed) {
  if (dim < 2) throw ValidationError("random_hamiltonian: dim must be >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  CMatrix a(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double re = normal(rng);
      const double im = normal(rng);
      a(r, c) = complex(re, im);
    }
  }
  return fit_to_band(HermitianOperator((a + a.adjoint()) * 0.5), e_max);
}

bool spectral_bound_check(const RVector& eigenvalues, double e_max) {
  constexpr double kTolerance = 1e-12;
  const double half = 0.5 * e_max;
  return std::all_of(eigenvalues.begin(), eigenvalues.end(), [&](double e) {
    return e >= -half - kTolerance && e <= half + kTolerance;
  });
}

bool spectral_bound_check(const HermitianOperator& op, double e_max) {
  return spectral_bound_check(eigendecompose(op).eigenvalues, e_max);
}

}  // namespace qwork
