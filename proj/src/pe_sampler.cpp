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

#include "qwork/pe_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qwork/errors.hpp"
#include "qwork/parallel.hpp"

namespace qwork {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSingularSine = 1e-12;
constexpr std::uint64_t kMaxJointAmplitudes = std::uint64_t{1} << 26;
constexpr std::size_t kComponentsPerBlock = 8;

constexpr std::uint64_t kCoarseStream = 0x50445f73616d706cULL;
constexpr std::uint64_t kExactStream = 0x505f73616d706c65ULL;

// In-place radix-2 DFT: a'_x = sum_t exp(sign * 2 pi i x t / n) a_t.
// Plain product; std::complex operator* adds inf/nan recovery that is not needed here.
inline complex mul(complex a, complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

class Fft {
 public:
  Fft(std::size_t n, int sign) : n_(n), twiddle_(n / 2), swaps_() {
    for (std::size_t k = 0; k < n / 2; ++k) {
      twiddle_[k] = std::polar(1.0, sign * 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n));
    }
    for (std::size_t i = 1, j = 0; i < n_; ++i) {
      std::size_t bit = n_ >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) swaps_.emplace_back(i, j);
    }
  }

  void operator()(complex* a) const {
    for (const auto& [i, j] : swaps_) std::swap(a[i], a[j]);
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t k = 0; k < half; ++k) {
          const complex u = a[start + k];
          const complex v = mul(a[start + k + half], twiddle_[k * stride]);
          a[start + k] = u + v;
          a[start + k + half] = u - v;
        }
      }
    }
  }

 private:
  std::size_t n_;
  std::vector<complex> twiddle_;
  std::vector<std::pair<std::size_t, std::size_t>> swaps_;
};

void check_protocol_fits(const QuenchProtocol& protocol, const SamplerConfig& config) {
  constexpr double kSlack = 1e-12;
  if (protocol.e_max() > config.e_max() * (1.0 + kSlack)) {
    std::ostringstream msg;
    msg << "sampler e_max " << config.e_max() << " is below the protocol bound "
        << protocol.e_max();
    throw ValidationError(msg.str());
  }
  const auto amplitudes = config.d() * static_cast<std::uint64_t>(protocol.dim());
  if (amplitudes > kMaxJointAmplitudes) {
    std::ostringstream msg;
    msg << "joint register of " << amplitudes << " amplitudes exceeds the memory guard of "
        << kMaxJointAmplitudes;
    throw ValidationError(msg.str());
  }
}

void check_bounded(const WorkDistribution& dist, const SamplerConfig& config) {
  const double bound = config.e_max() * (1.0 + 1e-12);
  for (const auto& [w, p] : dist.points()) {
    if (std::abs(w) > bound) {
      std::ostringstream msg;
      msg << "work value " << w << " lies outside [-e_max, e_max] for e_max = " << config.e_max();
      throw ValidationError(msg.str());
    }
  }
}

// One term of the convex decomposition of the initial state, expressed in
// the H eigenbasis on indices [begin, begin + coefficients.size()).
struct MixtureComponent {
  double weight;
  Eigen::Index begin;
  CVector coefficients;
};

std::vector<MixtureComponent> decompose_initial(const QuenchProtocol& protocol,
                                                const DensityMatrix& initial) {
  const CMatrix& rho = initial.matrix();
  const CMatrix& v = protocol.initial_spectrum().eigenvectors;
  std::vector<MixtureComponent> components;

  const CMatrix rho_eigen = v.adjoint() * rho * v;
  // [rho, H] in the eigenbasis of H: rho_ij (E_j - E_i).
  const RVector& e = protocol.initial_spectrum().eigenvalues;
  double commutator = 0.0;
  for (Eigen::Index j = 0; j < rho_eigen.cols(); ++j) {
    for (Eigen::Index i = 0; i < rho_eigen.rows(); ++i) {
      commutator = std::max(commutator, std::abs(rho_eigen(i, j)) * std::abs(e(j) - e(i)));
    }
  }
  if (commutator <= kStructuralTolerance) {
    for (const auto& [begin, end] : protocol.initial_levels()) {
      const Eigen::Index width = end - begin;
      if (width == 1) {
        const double p = rho_eigen(begin, begin).real();
        if (p > 0.0) components.push_back({p, begin, CVector::Ones(1)});
        continue;
      }
      Eigen::SelfAdjointEigenSolver<CMatrix> block(rho_eigen.block(begin, begin, width, width));
      for (Eigen::Index j = 0; j < width; ++j) {
        const double p = block.eigenvalues()(j);
        if (p > 0.0) components.push_back({p, begin, block.eigenvectors().col(j)});
      }
    }
    return components;
  }

  const double purity = rho.cwiseAbs2().sum();  // Tr(rho^2) for Hermitian rho
  if (std::abs(purity - 1.0) <= kStructuralTolerance) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(rho);
    const CVector psi = solver.eigenvectors().col(rho.rows() - 1);
    components.push_back({1.0, 0, v.adjoint() * psi});
    return components;
  }
  throw ValidationError(
      "simulate_circuit: initial state is neither diagonal in the H eigenbasis nor pure");
}

// Readout probabilities for one pure component. The state after step (v) is
// built analytically per eigenbranch (system in the H~ eigenbasis, which
// leaves the ancilla marginal unchanged), then the readout transform runs
// as an FFT over t for each final level m.
constexpr std::size_t kAnchor = 64;

void component_readout(const QuenchProtocol& protocol, const SamplerConfig& config,
                       const MixtureComponent& component, const Fft& readout,
                       std::vector<complex>& buffer, std::vector<double>& probabilities) {
  const auto d = static_cast<std::size_t>(config.d());
  const Eigen::Index dim = protocol.dim();
  const RVector& e_initial = protocol.initial_spectrum().eigenvalues;
  const RVector& e_final = protocol.final_spectrum().eigenvalues;
  const auto amps = protocol.transition_amplitudes().middleCols(component.begin,
                                                                component.coefficients.size());
  const double omega = 2.0 * kPi / (4.0 * config.e_max());
  const double scale = 1.0 / static_cast<double>(d);  // QFT and inverse QFT normalisations

  buffer.assign(d * static_cast<std::size_t>(dim), complex{});
  if (component.coefficients.size() == 1) {
    const complex c = component.coefficients(0);
    const double e_n = e_initial(component.begin);
    for (Eigen::Index m = 0; m < dim; ++m) {
      const complex a = amps(m, 0) * c * scale;
      if (a == complex{}) continue;
      const double gap = e_final(m) - e_n;
      complex* row = buffer.data() + static_cast<std::size_t>(m) * d;
      // Phase recurrence, re-anchored every kAnchor steps to bound rounding drift.
      const complex step = std::polar(1.0, -omega * gap);
      for (std::size_t t0 = 0; t0 < d; t0 += kAnchor) {
        complex phase = a * std::polar(1.0, -omega * gap * static_cast<double>(t0));
        const std::size_t t1 = std::min(d, t0 + kAnchor);
        for (std::size_t t = t0; t < t1; ++t) {
          row[t] = phase;
          phase = mul(phase, step);
        }
      }
    }
  } else {
    const auto width = component.coefficients.size();
    const auto levels = e_initial.segment(component.begin, width);
    CVector branch(width);
    for (std::size_t t = 0; t < d; ++t) {
      const double tt = static_cast<double>(t);
      for (Eigen::Index j = 0; j < width; ++j) {
        branch(j) = component.coefficients(j) * std::polar(scale, omega * levels(j) * tt);
      }
      const CVector mixed = amps * branch;
      for (Eigen::Index m = 0; m < dim; ++m) {
        buffer[static_cast<std::size_t>(m) * d + t] =
            mixed(m) * std::polar(1.0, -omega * e_final(m) * tt);
      }
    }
  }

  for (Eigen::Index m = 0; m < dim; ++m) {
    complex* row = buffer.data() + static_cast<std::size_t>(m) * d;
    readout(row);
    for (std::size_t x = 0; x < d; ++x) probabilities[x] += component.weight * std::norm(row[x]);
  }
}

// Applies `op` (system-only) to every ancilla branch of the joint amplitudes.
void apply_system(std::vector<complex>& amplitudes, std::uint64_t d, const CMatrix& op) {
  const Eigen::Index dim = op.rows();
  for (std::uint64_t t = 0; t < d; ++t) {
    Eigen::Map<CVector> branch(amplitudes.data() + t * static_cast<std::uint64_t>(dim), dim);
    branch = op * branch;
  }
}

// Multiplies branch t by exp(i * sign * omega * E_k * t) in an eigenbasis.
void apply_controlled_phases(std::vector<complex>& amplitudes, std::uint64_t d,
                             const RVector& energies, double signed_omega) {
  const Eigen::Index dim = energies.size();
  for (std::uint64_t t = 0; t < d; ++t) {
    complex* branch = amplitudes.data() + t * static_cast<std::uint64_t>(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
      branch[k] *= std::polar(1.0, signed_omega * energies(k) * static_cast<double>(t));
    }
  }
}

}  // namespace

SamplerConfig::SamplerConfig(int m_qubits, double e_max) : m_qubits_(m_qubits), e_max_(e_max) {
  if (m_qubits < 1 || m_qubits > kMaxQubits) {
    std::ostringstream msg;
    msg << "SamplerConfig: m_qubits must be in [1, " << kMaxQubits << "], got " << m_qubits;
    throw ValidationError(msg.str());
  }
  if (!(e_max > 0.0) || !std::isfinite(e_max)) {
    throw ValidationError("SamplerConfig: e_max must be finite and > 0");
  }
}

CoarseGrainedDistribution::CoarseGrainedDistribution(Kind kind, std::vector<double> values,
                                                     const SamplerConfig& config)
    : kind_(kind), values_(std::move(values)), config_(config) {
  if (values_.size() != config.d()) {
    std::ostringstream msg;
    msg << "CoarseGrainedDistribution: expected " << config.d() << " values, got "
        << values_.size();
    throw ValidationError(msg.str());
  }
  double total = 0.0;
  for (std::size_t x = 0; x < values_.size(); ++x) {
    double& v = values_[x];
    if (!std::isfinite(v) || v < -1e-12) {
      std::ostringstream msg;
      msg << "CoarseGrainedDistribution: invalid probability " << v << " at x = " << x;
      throw ValidationError(msg.str());
    }
    v = std::max(v, 0.0);
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "CoarseGrainedDistribution: total probability " << total << " differs from 1";
    throw ValidationError(msg.str());
  }
}

JointState::JointState(std::uint64_t ancilla_dim, Eigen::Index system_dim,
                       std::vector<complex> amplitudes)
    : ancilla_dim_(ancilla_dim), system_dim_(system_dim), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != ancilla_dim * static_cast<std::uint64_t>(system_dim)) {
    throw ValidationError("JointState: amplitude count does not match D * dim_S");
  }
  if (std::abs(norm() - 1.0) > kStructuralTolerance) {
    std::ostringstream msg;
    msg << "JointState: squared norm " << norm() << " differs from 1";
    throw ValidationError(msg.str());
  }
}

double JointState::norm() const {
  double sum = 0.0;
  for (const complex& a : amplitudes_) sum += std::norm(a);
  return sum;
}

std::vector<double> JointState::ancilla_marginal() const {
  std::vector<double> marginal(ancilla_dim_, 0.0);
  const auto dim = static_cast<std::uint64_t>(system_dim_);
  for (std::uint64_t x = 0; x < ancilla_dim_; ++x) {
    for (std::uint64_t s = 0; s < dim; ++s) marginal[x] += std::norm(amplitudes_[x * dim + s]);
  }
  return marginal;
}

double x_to_work(std::uint64_t x, const SamplerConfig& config) {
  const std::uint64_t d = config.d();
  if (x >= d) {
    std::ostringstream msg;
    msg << "x_to_work: outcome " << x << " outside [0, " << d << ")";
    throw ValidationError(msg.str());
  }
  const double signed_x = 2 * x <= d ? static_cast<double>(x)
                                     : static_cast<double>(x) - static_cast<double>(d);
  return config.bin_width() * signed_x;
}

std::uint64_t work_to_bin(double w, const SamplerConfig& config) {
  const auto d = static_cast<std::int64_t>(config.d());
  const auto q = static_cast<std::int64_t>(std::floor(w / config.bin_width() + 0.5));
  return static_cast<std::uint64_t>(((q % d) + d) % d);
}

double filter_weight(double z, const SamplerConfig& config) {
  const double d = static_cast<double>(config.d());
  const double phase = kPi * z / (4.0 * config.e_max());
  const double s = std::sin(phase);
  if (std::abs(s) < kSingularSine) return 1.0;
  const double num = std::sin(phase * d);
  return (num * num) / (d * d * s * s);
}

CoarseGrainedDistribution convolve_distribution(const WorkDistribution& dist,
                                                const SamplerConfig& config) {
  check_bounded(dist, config);
  const auto d = static_cast<std::size_t>(config.d());
  const double dd = static_cast<double>(d);
  const auto points = dist.points();
  const std::size_t n = points.size();

  // sin(pi z / 4E) = sin(pi x / D - phi_k) and sin^2(pi z D / 4E) = sin^2(D phi_k),
  // with phi_k = pi w_k / 4E.
  std::vector<double> sin_phi(n), cos_phi(n), numerator(n), mass(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double phi = kPi * points[k].w / (4.0 * config.e_max());
    sin_phi[k] = std::sin(phi);
    cos_phi[k] = std::cos(phi);
    const double s = std::sin(dd * phi);
    numerator[k] = s * s / (dd * dd);
    mass[k] = points[k].p;
  }

  std::vector<double> values(d, 0.0);
  parallel_for(d, [&](std::size_t x) {
    const double angle = kPi * static_cast<double>(x) / dd;
    const double sx = std::sin(angle);
    const double cx = std::cos(angle);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = sx * cos_phi[k] - cx * sin_phi[k];
      acc += mass[k] * (std::abs(s) < kSingularSine ? 1.0 : numerator[k] / (s * s));
    }
    values[x] = acc;
  });
  return CoarseGrainedDistribution(CoarseGrainedDistribution::Kind::filtered, std::move(values),
                                   config);
}

CoarseGrainedDistribution rectangular_coarse_grain(const WorkDistribution& dist,
                                                   const SamplerConfig& config) {
  check_bounded(dist, config);
  std::vector<double> values(config.d(), 0.0);
  for (const auto& [w, p] : dist.points()) values[work_to_bin(w, config)] += p;
  return CoarseGrainedDistribution(CoarseGrainedDistribution::Kind::rectangular,
                                   std::move(values), config);
}

JointState qft(const JointState& state, bool inverse) {
  const auto d = static_cast<std::size_t>(state.ancilla_dim());
  const auto dim = static_cast<std::size_t>(state.system_dim());
  if (d == 0 || (d & (d - 1)) != 0) throw ValidationError("qft: ancilla dimension must be 2^M");
  const Fft fft(d, inverse ? -1 : +1);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  const auto in = state.amplitudes();
  std::vector<complex> out(in.size());
  std::vector<complex> column(d);
  for (std::size_t s = 0; s < dim; ++s) {
    for (std::size_t x = 0; x < d; ++x) column[x] = in[x * dim + s];
    fft(column.data());
    for (std::size_t t = 0; t < d; ++t) out[t * dim + s] = column[t] * scale;
  }
  return JointState(state.ancilla_dim(), state.system_dim(), std::move(out));
}

CircuitRun run_pure_circuit(const QuenchProtocol& protocol, const CVector& psi,
                            const SamplerConfig& config) {
  check_protocol_fits(protocol, config);
  if (psi.size() != protocol.dim()) {
    throw ValidationError("run_pure_circuit: state dimension does not match the protocol");
  }
  const double psi_norm = psi.norm();
  if (!(psi_norm > 0.0)) throw ValidationError("run_pure_circuit: zero state vector");

  const std::uint64_t d = config.d();
  const Eigen::Index dim = protocol.dim();
  const double omega = 2.0 * kPi / (4.0 * config.e_max());
  const CMatrix& v = protocol.initial_spectrum().eigenvectors;
  const CMatrix& v_final = protocol.final_spectrum().eigenvectors;
  std::array<double, 6> norms{};

  // (i) ancilla |x = 0>, system psi.
  std::vector<complex> amplitudes(d * static_cast<std::uint64_t>(dim));
  for (Eigen::Index s = 0; s < dim; ++s) amplitudes[s] = psi(s) / psi_norm;
  JointState state(d, dim, std::move(amplitudes));
  norms[0] = state.norm();

  // (ii) Fourier preparation. The kernel sign pairs with the readout in (vi)
  // so that outcome x reads w = 4 e_max x / D.
  state = qft(state, /*inverse=*/true);
  norms[1] = state.norm();

  auto branches = std::vector<complex>(state.amplitudes().begin(), state.amplitudes().end());
  // (iii) controlled U^{dagger t}, U = exp(-2 pi i H / 4E).
  apply_system(branches, d, v.adjoint());
  apply_controlled_phases(branches, d, protocol.initial_spectrum().eigenvalues, +omega);
  apply_system(branches, d, v);
  norms[2] = JointState(d, dim, branches).norm();

  // (iv) drive.
  apply_system(branches, d, protocol.drive().matrix());
  norms[3] = JointState(d, dim, branches).norm();

  // (v) controlled U~^t.
  apply_system(branches, d, v_final.adjoint());
  apply_controlled_phases(branches, d, protocol.final_spectrum().eigenvalues, -omega);
  apply_system(branches, d, v_final);
  state = JointState(d, dim, std::move(branches));
  norms[4] = state.norm();

  // (vi) readout transform.
  state = qft(state, /*inverse=*/false);
  norms[5] = state.norm();
  return {std::move(state), norms};
}

CoarseGrainedDistribution simulate_circuit(const QuenchProtocol& protocol,
                                           const DensityMatrix& initial,
                                           const SamplerConfig& config) {
  check_protocol_fits(protocol, config);
  if (initial.dim() != protocol.dim()) {
    throw ValidationError("simulate_circuit: initial state dimension does not match the protocol");
  }
  const std::vector<MixtureComponent> components = decompose_initial(protocol, initial);
  const auto d = static_cast<std::size_t>(config.d());
  const Fft readout(d, +1);

  const std::size_t blocks = (components.size() + kComponentsPerBlock - 1) / kComponentsPerBlock;
  std::vector<std::vector<double>> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> probabilities(d, 0.0);
    std::vector<complex> buffer;
    const std::size_t end = std::min(components.size(), (b + 1) * kComponentsPerBlock);
    for (std::size_t c = b * kComponentsPerBlock; c < end; ++c) {
      component_readout(protocol, config, components[c], readout, buffer, probabilities);
    }
    partial[b] = std::move(probabilities);
  });

  std::vector<double> values(d, 0.0);
  for (const auto& block : partial) {
    for (std::size_t x = 0; x < d; ++x) values[x] += block[x];
  }
  return CoarseGrainedDistribution(CoarseGrainedDistribution::Kind::filtered, std::move(values),
                                   config);
}

WorkSampleSet sample(const CoarseGrainedDistribution& dist, std::size_t k, std::uint64_t seed,
                     std::string tag) {
  if (k < 1) throw ValidationError("sample: k must be >= 1");
  const DiscreteSampler sampler(dist.values());
  auto rng = make_stream(seed, kCoarseStream);
  WorkSampleSet out;
  out.samples.reserve(k);
  out.bins.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t x = sampler(rng);
    out.bins.push_back(x);
    out.samples.push_back(x_to_work(x, dist.config()));
  }
  out.seed = seed;
  out.source = {dist.config().m_qubits(), dist.e_max(), std::move(tag)};
  return out;
}

WorkSampleSet sample(const WorkDistribution& dist, std::size_t k, std::uint64_t seed,
                     std::string tag) {
  if (k < 1) throw ValidationError("sample: k must be >= 1");
  std::vector<double> weights;
  weights.reserve(dist.size());
  for (const auto& point : dist.points()) weights.push_back(point.p);
  const DiscreteSampler sampler(weights);
  auto rng = make_stream(seed, kExactStream);
  WorkSampleSet out;
  out.samples.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.samples.push_back(dist[sampler(rng)].w);
  out.seed = seed;
  out.source = {0, 0.0, std::move(tag)};
  return out;
}

double sup_norm_distance(const CoarseGrainedDistribution& a, const CoarseGrainedDistribution& b) {
  if (a.d() != b.d() || a.e_max() != b.e_max()) {
    throw ValidationError("sup_norm_distance: distributions differ in D or e_max");
  }
  double worst = 0.0;
  for (std::size_t x = 0; x < a.d(); ++x) worst = std::max(worst, std::abs(a[x] - b[x]));
  return worst;
}

double l1_distance(const CoarseGrainedDistribution& a, const CoarseGrainedDistribution& b) {
  if (a.d() != b.d() || a.e_max() != b.e_max()) {
    throw ValidationError("l1_distance: distributions differ in D or e_max");
  }
  double sum = 0.0;
  for (std::size_t x = 0; x < a.d(); ++x) sum += std::abs(a[x] - b[x]);
  return sum;
}

}  // namespace qwork
