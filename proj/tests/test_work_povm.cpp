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

#include <cmath>
#include <map>

#include "doctest.h"
#include "qwork/errors.hpp"
#include "qwork/work_povm.hpp"
#include "test_helpers.hpp"

using namespace qwork;
using qwork::testing::vec;

namespace {

// Spectral projector onto the level `target` of an operator with the given
// distinct level values, built as a Lagrange polynomial in the operator.
// Independent of any eigenvector gauge.
CMatrix level_projector(const CMatrix& op, const std::vector<double>& levels, double target) {
  const auto n = op.rows();
  CMatrix p = CMatrix::Identity(n, n);
  for (double other : levels) {
    if (other == target) continue;
    p = p * (op - other * CMatrix::Identity(n, n)) / (target - other);
  }
  return p;
}

// Two-point-measurement masses from projectors: w -> Tr(P~_b U P_a rho P_a U^dag P~_b).
std::map<double, double> projector_oracle(const CMatrix& h, const std::vector<double>& levels,
                                          const CMatrix& h_tilde,
                                          const std::vector<double>& final_levels,
                                          const CMatrix& u, const CMatrix& rho) {
  std::map<double, double> masses;
  for (double a : levels) {
    const CMatrix pa = level_projector(h, levels, a);
    for (double b : final_levels) {
      const CMatrix pb = level_projector(h_tilde, final_levels, b);
      const CMatrix branch = pb * u * pa;
      masses[b - a] += (branch * rho * branch.adjoint()).trace().real();
    }
  }
  return masses;
}

double mass_at(const WorkDistribution& dist, double w, double tol = 1e-9) {
  for (const auto& point : dist.points()) {
    if (std::abs(point.w - w) <= tol) return point.p;
  }
  return 0.0;
}

double total_mass(const WorkDistribution& dist) {
  double sum = 0.0;
  for (const auto& p : dist.points()) sum += p.p;
  return sum;
}

CMatrix diag_c(std::initializer_list<double> values) {
  return vec(values).cast<complex>().asDiagonal().toDenseMatrix();
}

}  // namespace

TEST_CASE("QuenchProtocol validates dimensions and spectral bounds") {
  const auto h2 = HermitianOperator::diagonal(vec({-0.5, 0.5}));
  const auto h3 = HermitianOperator::diagonal(vec({-0.5, 0.0, 0.5}));
  CHECK_THROWS_AS(QuenchProtocol(h2, h3, UnitaryMatrix::identity(2), 1.0), ValidationError);
  CHECK_THROWS_AS(QuenchProtocol(h2, h2, UnitaryMatrix::identity(3), 1.0), ValidationError);
  CHECK_THROWS_AS(QuenchProtocol(h2, h2, UnitaryMatrix::identity(2), 0.9), ValidationError);
  CHECK_THROWS_AS(QuenchProtocol(h2, h2, UnitaryMatrix::identity(2), -1.0), ValidationError);
  CHECK_NOTHROW(QuenchProtocol(h2, h2, UnitaryMatrix::identity(2), 1.0));
}

TEST_CASE("exact_work_distribution: no drive and no gap change gives a point mass at 0") {
  const auto h = random_hamiltonian(5, 1.0, 3);
  const QuenchProtocol protocol(h, h, UnitaryMatrix::identity(5), 1.0);
  for (std::uint64_t seed : {1, 2}) {
    const auto dist = exact_work_distribution(protocol, testing::random_density(5, seed));
    REQUIRE(dist.size() == 1);
    CHECK(std::abs(dist[0].w) < 1e-12);
    CHECK(std::abs(dist[0].p - 1.0) < 1e-10);
  }
}

TEST_CASE("exact_work_distribution: qubit flip masses") {
  const auto protocol = testing::qubit_flip();
  for (double beta : {0.0, 0.7, 3.0}) {
    const auto thermal = thermal_state(protocol.h_initial(), beta);
    const auto dist = exact_work_distribution(protocol, thermal.rho);
    REQUIRE(dist.size() == 2);
    const double z = 2.0 * std::cosh(beta / 2.0);
    CHECK(std::abs(dist[0].w + 1.0) < 1e-14);
    CHECK(std::abs(dist[1].w - 1.0) < 1e-14);
    CHECK(std::abs(dist[0].p - std::exp(-beta / 2.0) / z) < 1e-12);
    CHECK(std::abs(dist[1].p - std::exp(beta / 2.0) / z) < 1e-12);
  }
}

TEST_CASE("exact_work_distribution: random 3-qubit quench is normalised with bounded support") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto protocol = testing::random_protocol(8, 1.0, seed);
    const auto dist = exact_work_distribution(protocol, testing::random_density(8, seed + 50));
    CHECK(std::abs(total_mass(dist) - 1.0) < 1e-10);
    CHECK(dist.size() <= 64);
    for (std::size_t i = 1; i < dist.size(); ++i) {
      CHECK(dist[i].w - dist[i - 1].w > protocol.merge_tolerance());
    }
  }
}

TEST_CASE("exact_work_distribution matches the projector oracle with degenerate levels") {
  // H has a doubly degenerate level, rotated into a random basis so no
  // eigenvector gauge is privileged; rho carries coherences inside it.
  const CMatrix w = testing::random_unitary(3, 17).matrix();
  const CMatrix h = w * diag_c({-0.5, -0.5, 0.5}) * w.adjoint();
  const CMatrix h_tilde = diag_c({-0.3, 0.1, 0.4});
  const auto u = testing::random_unitary(3, 29);
  const QuenchProtocol protocol(HermitianOperator(h), HermitianOperator(h_tilde), u, 1.0);
  REQUIRE(protocol.initial_levels().size() == 2);

  for (std::uint64_t seed : {4, 5, 6}) {
    const auto rho = testing::random_density(3, seed);
    const auto oracle = projector_oracle(h, {-0.5, 0.5}, h_tilde, {-0.3, 0.1, 0.4}, u.matrix(),
                                         rho.matrix());
    const auto dist = exact_work_distribution(protocol, rho);
    CHECK(dist.size() == oracle.size());
    for (const auto& [gap, mass] : oracle) CHECK(std::abs(mass_at(dist, gap) - mass) < 1e-10);
  }
}

TEST_CASE("exact_work_distribution rejects a dimension mismatch") {
  CHECK_THROWS_AS(exact_work_distribution(testing::qubit_flip(), testing::random_density(3, 1)),
                  ValidationError);
}

TEST_CASE("kraus_operators: qubit flip has two rank-one outcomes and no w = 0 operator") {
  const auto protocol = testing::qubit_flip();
  const auto kraus = kraus_operators(protocol);
  REQUIRE(kraus.size() == 2);
  CHECK(std::abs(kraus.entries()[0].w + 1.0) < 1e-14);
  CHECK(std::abs(kraus.entries()[1].w - 1.0) < 1e-14);
  // A_{+1} = |phi~_1><phi_0| and A_{-1} = |phi~_0><phi_1|, up to eigenvector phases.
  const CMatrix up = kraus.dense(1).cwiseAbs().cast<complex>();
  const CMatrix down = kraus.dense(0).cwiseAbs().cast<complex>();
  CMatrix expected_up = CMatrix::Zero(2, 2);
  expected_up(1, 0) = 1.0;
  CHECK(max_abs(up - expected_up) < 1e-14);
  CHECK(max_abs(down - expected_up.transpose()) < 1e-14);
}

TEST_CASE("kraus_operators: completeness and consistency on random protocols") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(seed % 15);
    const auto protocol = testing::random_protocol(dim, 1.0 + 0.1 * seed, seed);
    const auto kraus = kraus_operators(protocol);
    CHECK(max_abs(kraus.completeness() - CMatrix::Identity(dim, dim)) < 1e-10);

    const auto rho = testing::random_density(dim, seed + 400);
    const auto dist = exact_work_distribution(protocol, rho);
    for (std::size_t i = 0; i < kraus.size(); ++i) {
      const double p = kraus.probability(i, rho);
      CHECK(std::abs(p - mass_at(dist, kraus.entries()[i].w, 1e-12)) < 1e-10);
      // Factored and dense routes agree.
      const CMatrix a = kraus.dense(i);
      CHECK(std::abs((a * rho.matrix() * a.adjoint()).trace().real() - p) < 1e-12);
    }
  }
}

TEST_CASE("kraus_operators: equally spaced levels give higher-rank outcomes") {
  const auto h = HermitianOperator::diagonal(vec({-1.0, 0.0, 1.0}));
  const QuenchProtocol protocol(h, h, testing::random_unitary(3, 8), 2.0);
  const auto kraus = kraus_operators(protocol);
  CHECK(kraus.size() == 5);  // w in {-2, -1, 0, 1, 2}
  std::map<long, long> rank_by_w;
  for (std::size_t i = 0; i < kraus.size(); ++i) {
    Eigen::JacobiSVD<CMatrix> svd(kraus.dense(i));
    long rank = 0;
    for (double s : svd.singularValues()) rank += s > 1e-12 ? 1 : 0;
    rank_by_w[std::lround(kraus.entries()[i].w)] = rank;
  }
  CHECK(rank_by_w[1] == 2);
  CHECK(rank_by_w[-1] == 2);
  CHECK(rank_by_w[0] == 3);
  CHECK(rank_by_w[2] == 1);
  CHECK(max_abs(kraus.completeness() - CMatrix::Identity(3, 3)) < 1e-10);
}

TEST_CASE("post_measurement_state: qubit flip upward jump") {
  const auto protocol = testing::qubit_flip();
  const double beta = 1.3;
  const auto thermal = thermal_state(protocol.h_initial(), beta);
  const auto post = post_measurement_state(protocol, thermal.rho, 1.0);
  CMatrix excited = CMatrix::Zero(2, 2);
  excited(1, 1) = 1.0;
  CHECK(max_abs(post.state.matrix() - excited) < 1e-12);
  CHECK(std::abs(post.probability - std::exp(beta / 2.0) / (2.0 * std::cosh(beta / 2.0))) < 1e-12);
}

TEST_CASE("post_measurement_state: degenerate gap leaves coherences between final levels") {
  const auto h = HermitianOperator::diagonal(vec({-1.0, 0.0, 1.0}));
  const QuenchProtocol protocol(h, h, testing::random_unitary(3, 8), 2.0);
  // Coherences between the two contributing initial levels survive into rho_w.
  const auto post = post_measurement_state(protocol, testing::random_density(3, 12), 1.0);
  // Support is span{phi~_1, phi~_2}, the final levels reachable with w = +1.
  const CMatrix& vf = protocol.final_spectrum().eigenvectors;
  const CMatrix in_final = vf.adjoint() * post.state.matrix() * vf;
  CHECK(std::abs(in_final(0, 0)) < 1e-12);
  CHECK(std::abs(in_final(1, 2)) > 1e-3);
  CHECK(std::abs(post.state.matrix().trace().real() - 1.0) < 1e-10);
}

TEST_CASE("post_measurement_state: trivial protocol at w = 0 keeps the energy populations") {
  const auto h = random_hamiltonian(4, 1.0, 21);
  const QuenchProtocol protocol(h, h, UnitaryMatrix::identity(4), 1.0);
  const auto rho = testing::random_density(4, 3);
  const auto post = post_measurement_state(protocol, rho, 0.0);
  const CMatrix& v = protocol.initial_spectrum().eigenvectors;
  const CMatrix before = v.adjoint() * rho.matrix() * v;
  const CMatrix after = v.adjoint() * post.state.matrix() * v;
  CHECK(max_abs((before.diagonal() - after.diagonal()).eval()) < 1e-10);
  CHECK(std::abs(post.probability - 1.0) < 1e-10);
}

TEST_CASE("post_measurement_state errors") {
  const auto protocol = testing::qubit_flip();
  const auto rho = thermal_state(protocol.h_initial(), 1.0).rho;
  CHECK_THROWS_AS(post_measurement_state(protocol, rho, 0.5), ValidationError);
  CHECK_THROWS_AS(post_measurement_state(protocol, rho, 0.0), NumericalError);
}

TEST_CASE("jarzynski_exact: hand-evaluated cases") {
  const auto h = random_hamiltonian(4, 1.0, 2);
  const auto trivial = jarzynski_exact(QuenchProtocol(h, h, UnitaryMatrix::identity(4), 1.0), 0.8);
  CHECK(std::abs(trivial.lhs - 1.0) < 1e-12);
  CHECK(std::abs(trivial.rhs - 1.0) < 1e-14);
  CHECK(std::abs(trivial.delta_f) < 1e-14);

  const auto flip = jarzynski_exact(testing::qubit_flip(), 2.0);
  CHECK(std::abs(flip.lhs - 1.0) < 1e-12);
  CHECK(std::abs(flip.rhs - 1.0) < 1e-14);

  const auto gap = jarzynski_exact(testing::gap_change(), 1.0);
  const double ratio = std::cosh(1.0) / std::cosh(0.5);
  CHECK(std::abs(gap.rhs - ratio) < 1e-12);
  CHECK(std::abs(gap.lhs - ratio) < 1e-12);
  CHECK(std::abs(gap.delta_f + std::log(ratio)) < 1e-12);
  CHECK(gap.delta_f == doctest::Approx(-0.3137).epsilon(1e-4));
  CHECK_THROWS_AS(jarzynski_exact(testing::qubit_flip(), 0.0), ValidationError);
}

TEST_CASE("Jarzynski identity holds on random protocols") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double e_max = 1.0 + seed % 3;
    const auto protocol = testing::random_protocol(2 + static_cast<Eigen::Index>(seed), e_max, seed);
    for (double beta_e : {0.1, 1.0, 10.0}) {
      const auto check = jarzynski_exact(protocol, beta_e / e_max);
      CHECK(std::abs(check.lhs - check.rhs) <= 1e-10 * check.rhs);
    }
  }
}

TEST_CASE("first moment equals the energy change for thermal inputs") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto protocol = testing::random_protocol(6, 1.0, seed);
    const auto rho = thermal_state(protocol.h_initial(), 1.5).rho;
    const auto dist = exact_work_distribution(protocol, rho);
    double mean = 0.0;
    for (const auto& [w, p] : dist.points()) mean += p * w;
    const CMatrix& u = protocol.drive().matrix();
    const double trace_formula =
        (u * rho.matrix() * u.adjoint() * protocol.h_final().matrix()).trace().real() -
        (rho.matrix() * protocol.h_initial().matrix()).trace().real();
    CHECK(std::abs(mean - trace_formula) < 1e-9);
  }
}

TEST_CASE("WorkDistribution invariants") {
  CHECK_THROWS_AS(WorkDistribution({}), ValidationError);
  CHECK_THROWS_AS(WorkDistribution({{0.0, 0.5}, {0.0, 0.5}}), ValidationError);
  CHECK_THROWS_AS(WorkDistribution({{1.0, 0.5}, {0.0, 0.5}}), ValidationError);
  CHECK_THROWS_AS(WorkDistribution({{0.0, 0.6}, {1.0, 0.5}}), ValidationError);
  CHECK_THROWS_AS(WorkDistribution({{0.0, 1.0}, {1.0, 0.0}}), ValidationError);
  CHECK_NOTHROW(WorkDistribution({{-1.0, 0.25}, {1.0, 0.75}}));
}

TEST_CASE("cluster_levels groups near-equal eigenvalues") {
  const auto clusters = cluster_levels(vec({-1.0, -1.0 + 1e-12, 0.0, 1.0, 1.0}), 1e-9);
  REQUIRE(clusters.size() == 3);
  CHECK(clusters[0].end - clusters[0].begin == 2);
  CHECK(clusters[1].end - clusters[1].begin == 1);
  CHECK(clusters[2].end - clusters[2].begin == 2);
}
