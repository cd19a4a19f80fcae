#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dht/hypothesis.hpp"

namespace dht::tool {

// Malformed problem files map to exit code 2.
class ProblemFormatError : public std::runtime_error {
 public:
  explicit ProblemFormatError(const std::string& what) : std::runtime_error(what) {}
};

struct Problem {
  HypothesisPair pair;
  std::string name;
};

// JSON problem file: alphabet sizes and the two joint laws, row-major;
// probabilities may be doubles or decimal strings.
Problem load_problem(const std::string& path);

// Named presets; "binary-example" is uniform X with BSC(0.1) vs BSC(0.01).
Problem preset_problem(const std::string& name);

// FNV-1a 64-bit digest, rendered as "fnv1a64:<hex>".
std::string fnv1a64_hex(const std::string& bytes);

// Sorted-key JSON text of a flat string->string map (manifest config echo).
std::string manifest_json(const std::string& command,
                          const std::vector<std::pair<std::string, std::string>>& config,
                          std::uint64_t seed, double wall_time_s,
                          const std::string& output_digest);

// %.9g float formatting used by every CSV/JSON emitter.
std::string fmt9(double v);

// "start:end:step" inclusive range.
std::vector<double> parse_range(const std::string& spec);
// comma-separated doubles
std::vector<double> parse_list(const std::string& spec);
// comma-separated ints
std::vector<int> parse_int_list(const std::string& spec);

void write_file(const std::string& path, const std::string& content);

}  // namespace dht::tool
