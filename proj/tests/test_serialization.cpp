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


#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include "doctest.h"
#include "qwork/errors.hpp"
#include "qwork/serialization.hpp"
#include "test_helpers.hpp"

using namespace qwork;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("qwork_serialization_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  for (double v : {0.0, -0.0, 1.0, 0.1, -1.0 / 3.0, 6.02214076e23, 5e-324,
                   std::numeric_limits<double>::max(), std::nextafter(1.0, 2.0)}) {
    const std::string text = format_double(v);
    double back = 1.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    CHECK(back == v);
    CHECK(std::signbit(back) == std::signbit(v));
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("matrix JSON round trip re-validates") {
  const auto dir = scratch_dir("matrix");
  const auto protocol = testing::random_protocol(6, 1.0, 4);
  save_matrix(dir / "h.json", protocol.h_initial().matrix());
  save_matrix(dir / "u.json", protocol.drive().matrix());
  CHECK((load_hermitian(dir / "h.json").matrix() - protocol.h_initial().matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((load_unitary(dir / "u.json").matrix() - protocol.drive().matrix()).cwiseAbs().maxCoeff() == 0.0);
  // A unitary that is not Hermitian fails the Hermitian loader with the file name attached.
  try {
    load_hermitian(dir / "u.json");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("u.json") != std::string::npos);
  }
}

TEST_CASE("matrix JSON: structural errors name the field") {
  const auto bad_size = nlohmann::json{{"dim", 2}, {"re", {1, 0, 0}}, {"im", {0, 0, 0, 0}}};
  CHECK_THROWS_WITH_AS(matrix_from_json(bad_size, "m"), doctest::Contains("'re'"), ValidationError);
  const auto missing = nlohmann::json{{"dim", 2}, {"re", {1, 0, 0, 1}}};
  CHECK_THROWS_WITH_AS(matrix_from_json(missing, "m"), doctest::Contains("'im'"), ValidationError);
  const auto text = nlohmann::json{{"dim", 1}, {"re", {"x"}}, {"im", {0}}};
  CHECK_THROWS_AS(matrix_from_json(text, "m"), ValidationError);
  const auto dir = scratch_dir("garbage");
  write_file_atomic(dir / "g.json", "{not json");
  CHECK_THROWS_AS(load_hermitian(dir / "g.json"), ValidationError);
  CHECK_THROWS_AS(load_hermitian(dir / "absent.json"), ValidationError);
}

TEST_CASE("work distribution CSV and JSON re-parse to the same points") {
  const auto protocol = testing::random_protocol(4, 1.0, 8);
  const auto dist = exact_work_distribution(protocol, thermal_state(protocol.h_initial(), 0.9).rho);
  const auto from_csv = parse_work_distribution_csv(work_distribution_csv(dist));
  const auto from_json = work_distribution_from_json(nlohmann::json::parse(work_distribution_json(dist).dump()));
  REQUIRE(from_csv.size() == dist.size());
  REQUIRE(from_json.size() == dist.size());
  for (std::size_t i = 0; i < dist.size(); ++i) {
    CHECK(from_csv.points()[i].w == dist.points()[i].w);
    CHECK(from_csv.points()[i].p == dist.points()[i].p);
    CHECK(from_json.points()[i].w == dist.points()[i].w);
    CHECK(from_json.points()[i].p == dist.points()[i].p);
  }
  CHECK_THROWS_AS(parse_work_distribution_csv("w,q\n0,1\n"), ValidationError);
  CHECK_THROWS_AS(parse_work_distribution_csv("w,p\n0,abc\n"), ValidationError);
}

TEST_CASE("coarse-grained CSV re-parses and checks the w column") {
  const SamplerConfig config(4, 1.0);
  const auto dist = convolve_distribution(
      exact_work_distribution(testing::qubit_flip(), thermal_state(testing::qubit_flip().initial_spectrum(), 1.0).rho),
      config);
  const std::string text = coarse_grained_csv(dist);
  const auto back = parse_coarse_grained_csv(text, CoarseGrainedDistribution::Kind::filtered, config);
  for (std::uint64_t x = 0; x < config.d(); ++x) CHECK(back[x] == dist[x]);

  std::string tampered = text;
  tampered.replace(tampered.find("\n1,") + 3, 4, "0.30");
  CHECK_THROWS_AS(parse_coarse_grained_csv(tampered, CoarseGrainedDistribution::Kind::filtered, config),
                  ValidationError);
}

TEST_CASE("samples CSV keeps its provenance header") {
  const auto flip = testing::qubit_flip();
  const auto pd = convolve_distribution(
      exact_work_distribution(flip, thermal_state(flip.initial_spectrum(), 1.0).rho), SamplerConfig(3, 1.0));
  const auto draws = sample(pd, 25, 99);
  const std::string text = samples_csv(draws);
  CHECK(text.find("# seed=99\n") != std::string::npos);
  CHECK(text.find("# K=25\n") != std::string::npos);
  CHECK(text.find("# M=3\n") != std::string::npos);
  const auto back = parse_samples_csv(text);
  CHECK(back.seed == 99);
  CHECK(back.k() == 25);
  CHECK(back.source.m_qubits == 3);
  CHECK(back.source.e_max == 1.0);
  CHECK(back.source.tag == draws.source.tag);
  CHECK(back.samples == draws.samples);
  CHECK(back.bins == draws.bins);

  CHECK_THROWS_AS(parse_samples_csv("index,x,w\n0,0,0\n"), ValidationError);
  CHECK_THROWS_AS(parse_samples_csv("# seed=1\n# K=2\nindex,x,w\n0,0,0\n"), ValidationError);
  CHECK_THROWS_AS(parse_samples_csv("# seed=1\n# K=2\nindex,x,w\n0,0,0\n2,0,0\n"), ValidationError);
}

TEST_CASE("convergence CSV layout") {
  const std::vector<ConvergenceRow> rows{{10, 0.1, 0.2, 0.01, 0.02, 0.15}};
  CHECK(convergence_csv(rows) == "K,dF_exactP,dF_PD,stderr_exactP,stderr_PD,dF_true\n10,0.1,0.2,0.01,0.02,0.15\n");
}

TEST_CASE("write_file_atomic replaces content and leaves no temporaries") {
  const auto dir = scratch_dir("atomic");
  write_file_atomic(dir / "f.txt", "first");
  write_file_atomic(dir / "f.txt", "second");
  CHECK(read_file(dir / "f.txt") == "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++entries;
  CHECK(entries == 1);
}
