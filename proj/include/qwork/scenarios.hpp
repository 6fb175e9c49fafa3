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
#include <string>

#include "qwork/work_povm.hpp"

namespace qwork {

struct ScenarioSpec {
  enum class Kind { gue, two_level_sg, custom };

  Kind kind = Kind::gue;
  int n_qubits = 3;
  double e_max = 1.0;
  std::uint64_t seed = 1;
  // two_level_sg
  double omega1 = 0.6;
  double omega2 = 1.0;
  double theta = 1.5707963267948966;
  // custom
  std::string h_path;
  std::string h_tilde_path;
  std::string u_path = "identity";
};

/// Sudden quench between two independent GUE Hamiltonians (seeds `seed` and
/// `seed ^ 1`), each rescaled to fill [-e_max/2, e_max/2]. U_E = identity.
QuenchProtocol build_gue_quench(int n_qubits, double e_max, std::uint64_t seed);

/// Two-level quench H = (omega1/2) Z, H~ = (omega2/2) Z, U_E = exp(-i theta X / 2).
/// Its work POVM has the four outcomes +-(omega2 - omega1)/2, +-(omega2 + omega1)/2.
QuenchProtocol build_two_level_sg(double omega1, double omega2, double theta, double e_max);

/// Protocol from matrix files; `u_path` may be the literal "identity".
QuenchProtocol load_custom(const std::string& h_path, const std::string& h_tilde_path,
                           const std::string& u_path, double e_max);

QuenchProtocol build_scenario(const ScenarioSpec& spec);

/// Short label recorded in output headers, e.g. "gue(n=10,seed=7)".
std::string describe(const ScenarioSpec& spec);

}  // namespace qwork
