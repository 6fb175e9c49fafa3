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

#include "qwork/serialization.hpp"

#include <unistd.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

#include "qwork/errors.hpp"

namespace qwork {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view field, std::size_t line_no) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    std::ostringstream msg;
    msg << "line " << line_no << ": cannot parse number '" << field << "'";
    throw ValidationError(msg.str());
  }
  return value;
}

std::uint64_t parse_uint(std::string_view field, std::size_t line_no) {
  field = trim(field);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    std::ostringstream msg;
    msg << "line " << line_no << ": cannot parse integer '" << field << "'";
    throw ValidationError(msg.str());
  }
  return value;
}

// Data rows of a CSV: skips '#' comments and the column header, checking
// that the header matches `columns`.
std::vector<std::vector<std::string_view>> csv_rows(std::string_view text,
                                                    std::string_view columns) {
  const std::size_t width = split(columns, ',').size();
  std::vector<std::vector<std::string_view>> rows;
  bool header_seen = false;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != columns) {
        std::ostringstream msg;
        msg << "line " << line_no << ": expected header '" << columns << "', got '" << line
            << "'";
        throw ValidationError(msg.str());
      }
      header_seen = true;
      continue;
    }
    auto fields = split(line, ',');
    if (fields.size() != width) {
      std::ostringstream msg;
      msg << "line " << line_no << ": expected " << width << " fields, got " << fields.size();
      throw ValidationError(msg.str());
    }
    rows.push_back(std::move(fields));
  }
  if (!header_seen) throw ValidationError("CSV has no header line '" + std::string(columns) + "'");
  return rows;
}

CMatrix load_matrix(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return matrix_from_json(doc, path.string());
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  return {{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

CMatrix matrix_from_json(const nlohmann::json& doc, const std::string& context) {
  auto fail = [&](const std::string& what) { throw ValidationError(context + ": " + what); };
  if (!doc.is_object()) fail("expected a JSON object");
  for (const char* key : {"dim", "re", "im"}) {
    if (!doc.contains(key)) fail(std::string("missing field '") + key + "'");
  }
  if (!doc["dim"].is_number_integer() || doc["dim"].get<long long>() < 1) {
    fail("field 'dim' must be a positive integer");
  }
  const auto n = doc["dim"].get<Eigen::Index>();
  const auto expected = static_cast<std::size_t>(n * n);
  for (const char* key : {"re", "im"}) {
    if (!doc[key].is_array() || doc[key].size() != expected) {
      fail(std::string("field '") + key + "' must be an array of dim*dim = " +
           std::to_string(expected) + " numbers");
    }
  }
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto i = static_cast<std::size_t>(r * n + c);
      const auto& re = doc["re"][i];
      const auto& im = doc["im"][i];
      if (!re.is_number() || !im.is_number()) {
        fail("non-numeric entry at index " + std::to_string(i));
      }
      m(r, c) = complex(re.get<double>(), im.get<double>());
    }
  }
  return m;
}

HermitianOperator load_hermitian(const std::filesystem::path& path) {
  CMatrix m = load_matrix(path);
  try {
    return HermitianOperator(std::move(m));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

UnitaryMatrix load_unitary(const std::filesystem::path& path) {
  CMatrix m = load_matrix(path);
  try {
    return UnitaryMatrix(std::move(m));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_matrix(const std::filesystem::path& path, const CMatrix& m) {
  write_file_atomic(path, matrix_to_json(m).dump() + "\n");
}

std::string work_distribution_csv(const WorkDistribution& dist) {
  std::string out = "w,p\n";
  for (const auto& [w, p] : dist.points()) {
    out += format_double(w) + "," + format_double(p) + "\n";
  }
  return out;
}

nlohmann::json work_distribution_json(const WorkDistribution& dist) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& [w, p] : dist.points()) points.push_back({{"w", w}, {"p", p}});
  return {{"points", std::move(points)}};
}

WorkDistribution parse_work_distribution_csv(std::string_view text) {
  std::vector<WorkPoint> points;
  std::size_t row = 0;
  for (const auto& fields : csv_rows(text, "w,p")) {
    ++row;
    points.push_back({parse_double(fields[0], row), parse_double(fields[1], row)});
  }
  return WorkDistribution(std::move(points));
}

WorkDistribution work_distribution_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("points") || !doc["points"].is_array()) {
    throw ValidationError("work distribution JSON: missing 'points' array");
  }
  std::vector<WorkPoint> points;
  for (const auto& p : doc["points"]) {
    if (!p.contains("w") || !p.contains("p") || !p["w"].is_number() || !p["p"].is_number()) {
      throw ValidationError("work distribution JSON: point without numeric 'w' and 'p'");
    }
    points.push_back({p["w"].get<double>(), p["p"].get<double>()});
  }
  return WorkDistribution(std::move(points));
}

std::string coarse_grained_csv(const CoarseGrainedDistribution& dist) {
  std::string out = "x,w,p\n";
  for (std::uint64_t x = 0; x < dist.d(); ++x) {
    out += std::to_string(x) + "," + format_double(x_to_work(x, dist.config())) + "," +
           format_double(dist[x]) + "\n";
  }
  return out;
}

CoarseGrainedDistribution parse_coarse_grained_csv(std::string_view text,
                                                   CoarseGrainedDistribution::Kind kind,
                                                   const SamplerConfig& config) {
  std::vector<double> values(config.d(), 0.0);
  std::vector<bool> seen(config.d(), false);
  std::size_t row = 0;
  for (const auto& fields : csv_rows(text, "x,w,p")) {
    ++row;
    const std::uint64_t x = parse_uint(fields[0], row);
    if (x >= config.d() || seen[x]) {
      throw ValidationError("coarse-grained CSV: bad or repeated x at row " + std::to_string(row));
    }
    if (parse_double(fields[1], row) != x_to_work(x, config)) {
      throw ValidationError("coarse-grained CSV: w column inconsistent with x at row " +
                            std::to_string(row));
    }
    seen[x] = true;
    values[x] = parse_double(fields[2], row);
  }
  return CoarseGrainedDistribution(kind, std::move(values), config);
}

std::string samples_csv(const WorkSampleSet& samples) {
  std::string out;
  out += "# seed=" + std::to_string(samples.seed) + "\n";
  out += "# K=" + std::to_string(samples.k()) + "\n";
  out += "# M=" + std::to_string(samples.source.m_qubits) + "\n";
  out += "# e_max=" + format_double(samples.source.e_max) + "\n";
  out += "# source=" + samples.source.tag + "\n";
  out += "index,x,w\n";
  for (std::size_t i = 0; i < samples.k(); ++i) {
    out += std::to_string(i) + ",";
    if (i < samples.bins.size()) out += std::to_string(samples.bins[i]);
    out += "," + format_double(samples.samples[i]) + "\n";
  }
  return out;
}

WorkSampleSet parse_samples_csv(std::string_view text) {
  WorkSampleSet out;
  bool have_seed = false;
  bool have_k = false;
  std::size_t declared_k = 0;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = trim(line);
    if (!line.starts_with("# ")) continue;
    line.remove_prefix(2);
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    const std::string_view key = line.substr(0, eq);
    const std::string_view value = line.substr(eq + 1);
    if (key == "seed") {
      out.seed = parse_uint(value, line_no);
      have_seed = true;
    } else if (key == "K") {
      declared_k = parse_uint(value, line_no);
      have_k = true;
    } else if (key == "M") {
      out.source.m_qubits = static_cast<int>(parse_uint(value, line_no));
    } else if (key == "e_max") {
      out.source.e_max = parse_double(value, line_no);
    } else if (key == "source") {
      out.source.tag = std::string(value);
    }
  }
  if (!have_seed || !have_k) throw ValidationError("samples CSV: missing seed or K header");
  std::size_t row = 0;
  for (const auto& fields : csv_rows(text, "index,x,w")) {
    if (parse_uint(fields[0], row + 1) != row) {
      throw ValidationError("samples CSV: index column out of sequence at row " +
                            std::to_string(row + 1));
    }
    if (!trim(fields[1]).empty()) out.bins.push_back(parse_uint(fields[1], row + 1));
    out.samples.push_back(parse_double(fields[2], row + 1));
    ++row;
  }
  if (out.samples.empty() || out.samples.size() != declared_k) {
    throw ValidationError("samples CSV: row count does not match the K header");
  }
  if (!out.bins.empty() && out.bins.size() != out.samples.size()) {
    throw ValidationError("samples CSV: x column partially filled");
  }
  return out;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows) {
  std::string out = "K,dF_exactP,dF_PD,stderr_exactP,stderr_PD,dF_true\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k) + "," + format_double(r.df_exact_p) + "," +
           format_double(r.df_pd) + "," + format_double(r.stderr_exact_p) + "," +
           format_double(r.stderr_pd) + "," + format_double(r.df_true) + "\n";
  }
  return out;
}

}  // namespace qwork
