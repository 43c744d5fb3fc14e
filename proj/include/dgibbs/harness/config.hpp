#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dgibbs/errors.hpp"

namespace dgibbs {

// Flat key=value file, one pair per line, '#' starts a comment.
inline std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const char* ws = " \t";
    const auto a = s.find_first_not_of(ws);
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(ws);
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) + " is not key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

// Declarative description of one benchmark run.
struct ExperimentConfig {
  std::string kind;                       // validate | image | ising | denoise | logreg
  std::string sampler = "dgibbs";         // dgibbs | gibbs | independent | suzuki
  long events = 100000;                   // iteration budget (axis updates / draws)
  int replicates = 1;
  std::uint64_t seed = 0;
  long record_stride = 0;                 // 0 = events/1000 (at least 1)
  std::string out;                        // CSV path; empty = don't write
  std::string coefficients = "sqrtprime"; // sqrtprime | ones

  // validate
  std::string dims = "4x4";
  double mass_min = 0.1;
  double mass_max = 1.1;

  // image / denoise
  std::string image_path;
  std::string synthetic;                  // e.g. smooth:32x32, uniform:8x8, disk:64x64
  double floor = -1.0;                    // zero-pixel substitute; -1 = 1e-6 * max

  // ising / denoise
  int lattice = 3;
  double beta = 1.0;
  double eta = 2.1;
  double flip_fraction = 0.1;
  std::string metric;                     // ising: mean_error | energy_reach
  double energy_tol = 0.05;

  // logreg
  std::string dataset;
  std::string label_column = "class";
  std::string positive_label = "0";

  std::string start;                      // zeros | image (denoise default: image)

  void set(const std::string& key, const std::string& value) {
    auto to_long = [&](const std::string& v) {
      try {
        return std::stol(v);
      } catch (...) {
        throw ConfigError("config: bad integer for " + key + ": '" + v + "'");
      }
    };
    auto to_double = [&](const std::string& v) {
      try {
        return std::stod(v);
      } catch (...) {
        throw ConfigError("config: bad number for " + key + ": '" + v + "'");
      }
    };
    if (key == "kind") kind = value;
    else if (key == "sampler") sampler = value;
    else if (key == "events") events = to_long(value);
    else if (key == "replicates") replicates = static_cast<int>(to_long(value));
    else if (key == "seed") seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "record_stride") record_stride = to_long(value);
    else if (key == "out") out = value;
    else if (key == "coefficients") coefficients = value;
    else if (key == "dims") dims = value;
    else if (key == "mass_min") mass_min = to_double(value);
    else if (key == "mass_max") mass_max = to_double(value);
    else if (key == "image") image_path = value;
    else if (key == "synthetic") synthetic = value;
    else if (key == "floor") floor = to_double(value);
    else if (key == "lattice") lattice = static_cast<int>(to_long(value));
    else if (key == "beta") beta = to_double(value);
    else if (key == "eta") eta = to_double(value);
    else if (key == "flip_fraction") flip_fraction = to_double(value);
    else if (key == "metric") metric = value;
    else if (key == "energy_tol") energy_tol = to_double(value);
    else if (key == "dataset") dataset = value;
    else if (key == "label_column") label_column = value;
    else if (key == "positive_label") positive_label = value;
    else if (key == "start") start = value;
    else throw ConfigError("config: unknown key '" + key + "'");
  }

  static ExperimentConfig from_file(const std::string& path) {
    ExperimentConfig cfg;
    for (const auto& [k, v] : parse_config_file(path)) cfg.set(k, v);
    return cfg;
  }

  void validate() const {
    if (kind != "validate" && kind != "image" && kind != "ising" && kind != "denoise" &&
        kind != "logreg")
      throw ConfigError("config: unknown kind '" + kind + "'");
    if (sampler != "dgibbs" && sampler != "gibbs" && sampler != "independent" &&
        sampler != "suzuki")
      throw ConfigError("config: unknown sampler '" + sampler + "'");
    if (coefficients != "sqrtprime" && coefficients != "ones")
      throw ConfigError("config: unknown coefficients mode '" + coefficients + "'");
    if (events < 1) throw ConfigError("config: events must be >= 1");
    if (replicates < 1) throw ConfigError("config: replicates must be >= 1");
  }
};

// "4x4", "32x32", "2x3x4" -> per-axis sizes
inline std::vector<int> parse_dims(const std::string& spec) {
  std::vector<int> dims;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t sep = std::min(spec.find('x', pos), spec.size());
    const std::string part = spec.substr(pos, sep - pos);
    try {
      std::size_t used = 0;
      const int d = std::stoi(part, &used);
      if (d < 1 || used != part.size()) throw std::invalid_argument("");
      dims.push_back(d);
    } catch (...) {
      throw ConfigError("config: bad dims '" + spec + "'");
    }
    pos = sep + 1;
  }
  if (dims.empty()) throw ConfigError("config: empty dims");
  return dims;
}

// "smooth:32x32" -> (kind, height, width)
inline void parse_synthetic(const std::string& spec, std::string& kind, int& height, int& width) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ConfigError("config: bad synthetic spec '" + spec + "'");
  kind = spec.substr(0, colon);
  const std::vector<int> hw = parse_dims(spec.substr(colon + 1));
  if (hw.size() != 2) throw ConfigError("config: synthetic spec needs HxW");
  height = hw[0];
  width = hw[1];
}

}  // namespace dgibbs
