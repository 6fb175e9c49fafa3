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

#include "qwork/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "qwork/errors.hpp"

namespace qwork {

DiscreteSampler::DiscreteSampler(std::span<const double> weights) {
  if (weights.empty()) throw ValidationError("DiscreteSampler: no weights");
  cdf_.reserve(weights.size());
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("DiscreteSampler: weights must be finite and non-negative");
    }
    total += w;
    cdf_.push_back(total);
  }
  if (!(total > 0.0)) throw ValidationError("DiscreteSampler: total weight is zero");
  for (double& c : cdf_) c /= total;
}

std::size_t DiscreteSampler::index_for(double u) const {
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it != cdf_.end()) return static_cast<std::size_t>(it - cdf_.begin());
  // u rounded past the last CDF value: take the last entry with positive weight.
  std::size_t i = cdf_.size() - 1;
  while (i > 0 && cdf_[i] == cdf_[i - 1]) --i;
  return i;
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace qwork
