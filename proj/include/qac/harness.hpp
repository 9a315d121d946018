#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qac/decoding.hpp"
#include "qac/encoding.hpp"
#include "qac/sampling.hpp"
#include "qac/topology.hpp"

namespace qac {

// Uniform view over the graphs chains get placed on: hardware qubits for the
// U/C strategies, fully functional encoded vertices otherwise.
struct GraphView {
  int n = 0;
  std::vector<uint8_t> eligible;
  std::vector<int> adj_off, adj;

  std::span<const int> neighbors_of(int v) const {
    return {adj.data() + adj_off[v], adj.data() + adj_off[v + 1]};
  }
};

GraphView view_of(const HardwareGraph& g);
GraphView view_of(const EncodedGraph& g);

struct ChainInstance {
  std::vector<int> vertices;  // consecutive entries adjacent, no repeats
  uint64_t seed = 0;
};

// Uniformly seeded self-avoiding walk over eligible vertices; restarts with
// fresh derived seeds up to max_attempts before giving up.
ChainInstance place_random_chain(const GraphView& view, int length, uint64_t seed,
                                 int max_attempts = 10000);

// Disjoint placements (for the C strategy's four parallel copies).
std::vector<ChainInstance> place_disjoint_chains(const GraphView& view, int copies, int length,
                                                 uint64_t seed, int max_attempts = 10000);

struct Stats {
  double mean = 0;
  double sem = 0;
};

// Mean and standard error of the mean over instances (sigma/sqrt(n) with the
// population 1/n variance). Requires at least two values.
Stats aggregate(std::span<const double> values);

enum class Strategy { U, C, EP, QacCT, QacEM, QacMV };
const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);
bool is_encoded(Strategy s);

struct SamplerSettings {
  enum class Backend { Metropolis, ExactGibbs };
  Backend backend = Backend::Metropolis;
  AnnealSchedule schedule;
  int64_t reads = 1000;
  double gibbs_beta = 1.0;  // ExactGibbs backend only
  int threads = 0;

  std::string describe() const;
};

// --- per-instance success probabilities -----------------------------------

// U: fraction of reads in either degenerate ground state of the chain.
double unprotected_success(const ChainInstance& chain, double alpha, const SamplerSettings& s,
                           uint64_t seed);

// C: four disjoint copies run as one problem; a read succeeds when at least
// one copy is in a ground state. per_copy, when given, receives the four
// individual success rates.
double classical_success(std::span<const ChainInstance> copies, double alpha,
                         const SamplerSettings& s, uint64_t seed,
                         std::array<double, 4>* per_copy = nullptr);

// Success of one decoding scheme (or EP) evaluated on an existing sample set.
double scheme_success(const EncodedChain& chain, const SampleSet& samples, Strategy scheme,
                      uint64_t ct_seed = 0);

// Exact-Gibbs success (expected over coin tosses for QacCT).
double scheme_success_gibbs(const EncodedChain& chain, double beta, Strategy scheme);

// EP/QAC success for one compiled chain; samples internally per the backend.
double encoded_success(const EncodedChain& chain, Strategy scheme, const SamplerSettings& s,
                       uint64_t seed);

// --- experiment orchestration ----------------------------------------------

// One benchmark instance: a single placed chain, or four disjoint chains for
// the C strategy.
using InstanceSet = std::vector<ChainInstance>;

// Places `count` instances for a strategy (C gets four disjoint chains per
// instance). Deterministic in (seed, instance index).
std::vector<InstanceSet> place_instances(Strategy strat, const GraphView& view, int length,
                                         int count, uint64_t seed);

struct StrategyOutcome {
  Strategy strategy = Strategy::U;
  int chain_length = 0;
  double alpha = 0;
  std::optional<double> gamma;
  std::vector<double> per_instance;
  Stats stats;
};

// Runs one strategy over placed instances. For encoded strategies the
// instances hold encoded-graph paths and gamma must be set; `map` is required
// then. Instances run in parallel; outcomes merge in instance order.
StrategyOutcome run_strategy(Strategy strat, const EncodingMap* map,
                             std::span<const InstanceSet> instances, double alpha,
                             std::optional<double> gamma, const SamplerSettings& s, uint64_t seed,
                             int threads = 0);

struct SweepResult {
  std::vector<StrategyOutcome> surface;  // one outcome per grid point
  double gamma_opt = 0;                  // argmax of mean success, ties to smaller gamma
};

SweepResult sweep_gamma(Strategy strat, const EncodingMap& map,
                        std::span<const InstanceSet> instances, double alpha,
                        std::span<const double> gamma_grid, const SamplerSettings& s,
                        uint64_t seed, int threads = 0);

// Effective-energy-scale equalization: Pudenz313 at alpha, Square414 at
// 1.5*alpha, so both run at effective scale 3*alpha. Rejects 1.5*alpha > 1.
struct EqualizedAlphas {
  double pudenz_alpha = 0;
  double square_alpha = 0;
};
EqualizedAlphas equalized_alphas(double alpha);

}  // namespace qac
