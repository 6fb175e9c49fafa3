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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "qwork/estimators.hpp"
#include "qwork/pe_sampler.hpp"
#include "qwork/sampling.hpp"
#include "qwork/spectral.hpp"
#include "qwork/work_povm.hpp"

namespace qwork {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// Matrix documents: {"dim": n, "re": [n*n row-major], "im": [n*n row-major]}.
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& doc, const std::string& context);

HermitianOperator load_hermitian(const std::filesystem::path& path);
UnitaryMatrix load_unitary(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const CMatrix& m);

// Work distribution: CSV with columns w,p and JSON {"points": [{"w":..,"p":..}]}.
std::string work_distribution_csv(const WorkDistribution& dist);
nlohmann::json work_distribution_json(const WorkDistribution& dist);
WorkDistribution parse_work_distribution_csv(std::string_view text);
WorkDistribution work_distribution_from_json(const nlohmann::json& doc);

// Coarse-grained table: CSV with columns x,w,p.
std::string coarse_grained_csv(const CoarseGrainedDistribution& dist);
CoarseGrainedDistribution parse_coarse_grained_csv(std::string_view text,
                                                   CoarseGrainedDistribution::Kind kind,
                                                   const SamplerConfig& config);

// Samples: '#'-prefixed provenance header (seed, K, M, e_max, source), then
// columns index,x,w.
std::string samples_csv(const WorkSampleSet& samples);
WorkSampleSet parse_samples_csv(std::string_view text);

// Convergence table: K,dF_exactP,dF_PD,stderr_exactP,stderr_PD,dF_true.
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

}  // namespace qwork
