#include "problem_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace dht::tool {

namespace {

double number_of(const nlohmann::json& v, const char* where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      std::size_t pos = 0;
      double d = std::stod(v.get<std::string>(), &pos);
      if (pos != v.get<std::string>().size()) throw std::invalid_argument("trailing");
      return d;
    } catch (const std::exception&) {
      throw ProblemFormatError(std::string("bad decimal string in ") + where);
    }
  }
  throw ProblemFormatError(std::string("expected number or string in ") + where);
}

JointPmf matrix_of(const nlohmann::json& m, std::size_t nx, std::size_t ny,
                   const char* where) {
  if (!m.is_array() || m.size() != nx)
    throw ProblemFormatError(std::string(where) + ": wrong row count");
  std::vector<std::vector<double>> rows;
  for (const auto& r : m) {
    if (!r.is_array() || r.size() != ny)
      throw ProblemFormatError(std::string(where) + ": wrong column count");
    std::vector<double> row;
    for (const auto& v : r) row.push_back(number_of(v, where));
    rows.push_back(std::move(row));
  }
  try {
    return JointPmf(std::move(rows));
  } catch (const std::invalid_argument& e) {
    throw ProblemFormatError(std::string(where) + ": " + e.what());
  }
}

}  // namespace

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProblemFormatError("cannot open problem file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ProblemFormatError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.contains("X") || !j.contains("Y") || !j.contains("P_XY") ||
      !j.contains("Pbar_XY"))
    throw ProblemFormatError("problem file needs X, Y, P_XY, Pbar_XY");
  std::size_t nx = j["X"].get<std::size_t>();
  std::size_t ny = j["Y"].get<std::size_t>();
  if (nx < 1 || ny < 1 || nx > 8 || ny > 8)
    throw ProblemFormatError("alphabet sizes outside [1,8]");
  JointPmf p = matrix_of(j["P_XY"], nx, ny, "P_XY");
  JointPmf pb = matrix_of(j["Pbar_XY"], nx, ny, "Pbar_XY");
  try {
    return {HypothesisPair(std::move(p), std::move(pb)),
            j.value("name", std::string("problem"))};
  } catch (const std::invalid_argument& e) {
    throw ProblemFormatError(e.what());
  }
}

Problem preset_problem(const std::string& name) {
  if (name == "binary-example")
    return {HypothesisPair::binary_example(), name};
  throw ProblemFormatError("unknown preset: " + name);
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string manifest_json(const std::string& command,
                          const std::vector<std::pair<std::string, std::string>>& config,
                          std::uint64_t seed, double wall_time_s,
                          const std::string& output_digest) {
  nlohmann::json j;
  j["command"] = command;
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [k, v] : config) cfg[k] = v;
  j["config"] = cfg;
  j["seed"] = seed;
  j["library_version"] = "0.1.0";
  j["wall_time_s"] = wall_time_s;
  j["output_digest"] = output_digest;
  return j.dump(2) + "\n";
}

std::vector<double> parse_range(const std::string& spec) {
  double a, b, s;
  char c1, c2;
  std::istringstream in(spec);
  if (!(in >> a >> c1 >> b >> c2 >> s) || c1 != ':' || c2 != ':' || s <= 0.0)
    throw std::invalid_argument("bad range spec (want start:end:step): " + spec);
  std::vector<double> out;
  for (int i = 0;; ++i) {
    double v = a + s * i;
    if (v > b + 1e-12) break;
    out.push_back(std::min(v, b));
  }
  if (out.empty()) throw std::invalid_argument("empty range: " + spec);
  return out;
}

std::vector<double> parse_list(const std::string& spec) {
  std::vector<double> out;
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty list: " + spec);
  return out;
}

std::vector<int> parse_int_list(const std::string& spec) {
  std::vector<int> out;
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stoi(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty list: " + spec);
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace dht::tool
