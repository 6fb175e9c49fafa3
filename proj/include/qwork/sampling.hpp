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
#include <random>
#include <span>
#include <string>
#include <vector>

namespace qwork {

/// Where a sample set came from; written into every samples file header.
struct SampleSource {
  int m_qubits = 0;  // 0 when drawn from the exact distribution
  double e_max = 0.0;
  std::string tag;
};

/// Seeded sequence of sampled work values. `bins` holds the ancilla outcome x
/// of each sample (empty for samples drawn from an exact distribution).
struct WorkSampleSet {
  std::vector<double> samples;
  std::vector<std::uint64_t> bins;
  std::uint64_t seed = 0;
  SampleSource source;

  std::size_t k() const { return samples.size(); }
};

/// Inverse-CDF sampler over a finite set of non-negative weights.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> weights);

  std::size_t size() const { return cdf_.size(); }
  /// Index whose CDF interval contains u in [0, 1).
  std::size_t index_for(double u) const;

  template <class Rng>
  std::size_t operator()(Rng& rng) const {
    return index_for(uniform01(rng));
  }

  /// 53-bit uniform in [0, 1) from one 64-bit draw; identical on every platform.
  template <class Rng>
  static double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }

 private:
  std::vector<double> cdf_;
};

/// Generator for one named stream derived from a run seed, so independent
/// consumers of the same seed do not share draws.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

}  // namespace qwork
