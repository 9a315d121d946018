#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qac/encoding.hpp"
#include "qac/harness.hpp"

namespace qac {

// Experiment description, read from JSON. Validation failures throw
// Error(Validation) naming the offending field path. The seed is mandatory:
// every output must be reproducible from the config alone.
struct ExperimentConfig {
  int rows = 8, cols = 8, cell_size = 4;
  std::vector<int> faults;
  CodeKind code = CodeKind::Square414;
  std::vector<Strategy> strategies;
  std::vector<double> alphas;
  std::vector<double> gammas;
  std::vector<int> chain_lengths;
  int instances = 30;
  uint64_t seed = 0;
  SamplerSettings sampler;
  std::string output_dir = "out";
  std::string mode = "standard";  // "standard" | "equalized"
  bool persist_samples = false;
  bool emit_hamming = false;
  bool emit_ties = false;
  int threads = 0;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& c);

}  // namespace qac
