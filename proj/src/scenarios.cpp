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

#include "qwork/scenarios.hpp"

#include <cmath>
#include <sstream>

#include "qwork/errors.hpp"
#include "qwork/serialization.hpp"

namespace qwork {

QuenchProtocol build_gue_quench(int n_qubits, double e_max, std::uint64_t seed) {
  if (n_qubits < 1 || n_qubits > 12) {
    throw ValidationError("build_gue_quench: n_qubits must be in [1, 12], got " +
                          std::to_string(n_qubits));
  }
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  return QuenchProtocol(random_hamiltonian(dim, e_max, seed),
                        random_hamiltonian(dim, e_max, seed ^ 1U), UnitaryMatrix::identity(dim),
                        e_max);
}

QuenchProtocol build_two_level_sg(double omega1, double omega2, double theta, double e_max) {
  if (!(omega1 > 0.0) || !(omega2 > 0.0) || !std::isfinite(theta)) {
    throw ValidationError("build_two_level_sg: omega1, omega2 must be > 0 and theta finite");
  }
  if (omega1 > e_max || omega2 > e_max) {
    std::ostringstream msg;
    msg << "build_two_level_sg: level splittings (" << omega1 << ", " << omega2
        << ") exceed e_max = " << e_max;
    throw ValidationError(msg.str());
  }
  RVector z(2);
  z << 1.0, -1.0;
  CMatrix drive(2, 2);
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  drive << complex(c, 0.0), complex(0.0, -s), complex(0.0, -s), complex(c, 0.0);
  return QuenchProtocol(HermitianOperator::diagonal(0.5 * omega1 * z),
                        HermitianOperator::diagonal(0.5 * omega2 * z), UnitaryMatrix(drive),
                        e_max);
}

QuenchProtocol load_custom(const std::string& h_path, const std::string& h_tilde_path,
                           const std::string& u_path, double e_max) {
  HermitianOperator h = load_hermitian(h_path);
  HermitianOperator h_tilde = load_hermitian(h_tilde_path);
  UnitaryMatrix u = (u_path.empty() || u_path == "identity") ? UnitaryMatrix::identity(h.dim())
                                                              : load_unitary(u_path);
  return QuenchProtocol(std::move(h), std::move(h_tilde), std::move(u), e_max);
}

QuenchProtocol build_scenario(const ScenarioSpec& spec) {
  switch (spec.kind) {
    case ScenarioSpec::Kind::gue:
      return build_gue_quench(spec.n_qubits, spec.e_max, spec.seed);
    case ScenarioSpec::Kind::two_level_sg:
      return build_two_level_sg(spec.omega1, spec.omega2, spec.theta, spec.e_max);
    case ScenarioSpec::Kind::custom:
      return load_custom(spec.h_path, spec.h_tilde_path, spec.u_path, spec.e_max);
  }
  throw ValidationError("build_scenario: unknown scenario kind");
}

std::string describe(const ScenarioSpec& spec) {
  std::ostringstream out;
  switch (spec.kind) {
    case ScenarioSpec::Kind::gue:
      out << "gue(n=" << spec.n_qubits << ",seed=" << spec.seed << ")";
      break;
    case ScenarioSpec::Kind::two_level_sg:
      out << "two-level-sg(omega1=" << format_double(spec.omega1)
          << ",omega2=" << format_double(spec.omega2) << ",theta=" << format_double(spec.theta)
          << ")";
      break;
    case ScenarioSpec::Kind::custom:
      out << "custom(h=" << spec.h_path << ",h_tilde=" << spec.h_tilde_path
          << ",u=" << spec.u_path << ")";
      break;
  }
  return out.str();
}

}  // namespace qwork
