#include "qac/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "qac/errors.hpp"

namespace qac {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  fail(ErrorKind::Validation, "config." + path + ": " + why);
}

const json& need(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) bad(path.empty() ? key : path + "." + key, "missing");
  return j[key];
}

template <typename T>
T get_as(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    bad(path, "wrong type");
  }
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  if (!j.is_object()) fail(ErrorKind::Validation, "config: expected a JSON object");

  if (j.contains("topology")) {
    const auto& t = j["topology"];
    if (t.contains("rows")) c.rows = get_as<int>(t["rows"], "topology.rows");
    if (t.contains("cols")) c.cols = get_as<int>(t["cols"], "topology.cols");
    if (t.contains("cell_size")) c.cell_size = get_as<int>(t["cell_size"], "topology.cell_size");
    if (t.contains("faults"))
      c.faults = get_as<std::vector<int>>(t["faults"], "topology.faults");
  }
  if (j.contains("code")) c.code = code_from_name(get_as<std::string>(j["code"], "code"));

  for (const auto& s :
       get_as<std::vector<std::string>>(need(j, "", "strategies"), "strategies"))
    c.strategies.push_back(strategy_from_name(s));

  c.alphas = get_as<std::vector<double>>(need(j, "", "alphas"), "alphas");
  if (j.contains("gammas")) c.gammas = get_as<std::vector<double>>(j["gammas"], "gammas");
  c.chain_lengths = get_as<std::vector<int>>(need(j, "", "chain_lengths"), "chain_lengths");
  if (j.contains("instances")) c.instances = get_as<int>(j["instances"], "instances");

  if (!j.contains("seed")) bad("seed", "missing (outputs must be reproducible from the config)");
  c.seed = get_as<uint64_t>(j["seed"], "seed");

  if (j.contains("sampler")) {
    const auto& s = j["sampler"];
    if (s.contains("backend")) {
      auto b = get_as<std::string>(s["backend"], "sampler.backend");
      if (b == "metropolis")
        c.sampler.backend = SamplerSettings::Backend::Metropolis;
      else if (b == "exact-gibbs")
        c.sampler.backend = SamplerSettings::Backend::ExactGibbs;
      else
        bad("sampler.backend", "unknown backend '" + b + "' (metropolis|exact-gibbs)");
    }
    if (s.contains("beta_start"))
      c.sampler.schedule.beta_start = get_as<double>(s["beta_start"], "sampler.beta_start");
    if (s.contains("beta_end"))
      c.sampler.schedule.beta_end = get_as<double>(s["beta_end"], "sampler.beta_end");
    if (s.contains("fixed_beta")) {
      double b = get_as<double>(s["fixed_beta"], "sampler.fixed_beta");
      c.sampler.schedule.beta_start = c.sampler.schedule.beta_end = b;
    }
    if (s.contains("sweeps")) c.sampler.schedule.sweeps = get_as<int>(s["sweeps"], "sampler.sweeps");
    if (s.contains("reads")) c.sampler.reads = get_as<int64_t>(s["reads"], "sampler.reads");
    if (s.contains("gibbs_beta"))
      c.sampler.gibbs_beta = get_as<double>(s["gibbs_beta"], "sampler.gibbs_beta");
  }

  if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j["output_dir"], "output_dir");
  if (j.contains("mode")) c.mode = get_as<std::string>(j["mode"], "mode");
  if (j.contains("persist_samples"))
    c.persist_samples = get_as<bool>(j["persist_samples"], "persist_samples");
  if (j.contains("emit_hamming")) c.emit_hamming = get_as<bool>(j["emit_hamming"], "emit_hamming");
  if (j.contains("emit_ties")) c.emit_ties = get_as<bool>(j["emit_ties"], "emit_ties");
  if (j.contains("threads")) c.threads = get_as<int>(j["threads"], "threads");

  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (rows < 1 || cols < 1 || cell_size < 1)
    fail(ErrorKind::Validation, "config.topology: dimensions must be >= 1");
  if (strategies.empty()) fail(ErrorKind::Validation, "config.strategies: empty");
  if (alphas.empty()) fail(ErrorKind::Validation, "config.alphas: empty");
  for (double a : alphas)
    if (!(a >= 0 && a <= 1)) fail(ErrorKind::Validation, "config.alphas: values must be in [0,1]");
  for (double g : gammas)
    if (!(g >= 0 && g <= 1)) fail(ErrorKind::Validation, "config.gammas: values must be in [0,1]");
  if (chain_lengths.empty()) fail(ErrorKind::Validation, "config.chain_lengths: empty");
  for (int l : chain_lengths)
    if (l < 2) fail(ErrorKind::Validation, "config.chain_lengths: lengths must be >= 2");
  if (instances < 2)
    fail(ErrorKind::Validation, "config.instances: need >= 2 instances for error bars");
  if (mode != "standard" && mode != "equalized")
    fail(ErrorKind::Validation, "config.mode: unknown mode '" + mode + "'");

  bool any_encoded = false;
  for (Strategy s : strategies) {
    any_encoded |= is_encoded(s);
    if (mode == "standard") {
      if (s == Strategy::QacMV && code != CodeKind::Pudenz313)
        fail(ErrorKind::Validation, "config.strategies: QAC-MV applies to pudenz313 only");
      if ((s == Strategy::QacCT || s == Strategy::QacEM) && code != CodeKind::Square414)
        fail(ErrorKind::Validation, "config.strategies: QAC-CT/QAC-EM apply to square414 only");
    }
  }
  if (any_encoded && gammas.empty())
    fail(ErrorKind::Validation, "config.gammas: required for encoded strategies");
  if (mode == "equalized")
    for (double a : alphas)
      if (1.5 * a > 1.0)
        fail(ErrorKind::Validation,
             "config.alphas: equalized mode needs 1.5*alpha <= 1, got alpha=" +
                 std::to_string(a));
  sampler.schedule.validate();
  if (sampler.reads < 1) fail(ErrorKind::Validation, "config.sampler.reads: must be >= 1");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Validation, "config parse error: " + std::string(e.what()));
  }
  return config_from_json(j);
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["topology"] = {{"rows", c.rows}, {"cols", c.cols}, {"cell_size", c.cell_size},
                   {"faults", c.faults}};
  j["code"] = code_name(c.code);
  std::vector<std::string> strat;
  for (Strategy s : c.strategies) strat.push_back(strategy_name(s));
  j["strategies"] = strat;
  j["alphas"] = c.alphas;
  j["gammas"] = c.gammas;
  j["chain_lengths"] = c.chain_lengths;
  j["instances"] = c.instances;
  j["seed"] = c.seed;
  j["sampler"] = {
      {"backend",
       c.sampler.backend == SamplerSettings::Backend::Metropolis ? "metropolis" : "exact-gibbs"},
      {"beta_start", c.sampler.schedule.beta_start},
      {"beta_end", c.sampler.schedule.beta_end},
      {"sweeps", c.sampler.schedule.sweeps},
      {"reads", c.sampler.reads},
      {"gibbs_beta", c.sampler.gibbs_beta}};
  j["output_dir"] = c.output_dir;
  j["mode"] = c.mode;
  j["persist_samples"] = c.persist_samples;
  j["emit_hamming"] = c.emit_hamming;
  j["emit_ties"] = c.emit_ties;
  j["threads"] = c.threads;
  return j;
}

}  // namespace qac
