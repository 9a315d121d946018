#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qac/encoding.hpp"
#include "qac/ising.hpp"

namespace qac {

// Linear-in-sweep inverse-temperature ramp. The hardware stand-in: the real
// devices' annealing schedules are not modeled, final states are drawn by
// thermal annealing instead.
struct AnnealSchedule {
  double beta_start = 0.1;
  double beta_end = 5.0;
  int sweeps = 1000;

  static AnnealSchedule fixed(double beta, int sweeps) { return {beta, beta, sweeps}; }
  std::vector<double> betas() const;
  void validate() const;  // beta_start <= beta_end, sweeps >= 1
};

struct SampleEntry {
  std::vector<int8_t> spins;  // ±1, parallel to SampleSet::qubit_ids
  int64_t count = 0;
  double energy = 0;
};

// Multiset of final-state reads, deduplicated and sorted by configuration.
struct SampleSet {
  std::vector<int> qubit_ids;
  int64_t reads = 0;
  uint64_t seed = 0;
  std::string sampler;
  std::vector<SampleEntry> entries;

  int64_t total_count() const;
};

// Independent single-spin-flip Metropolis anneals, one per read, from uniform
// random initial configurations. Deterministic given the seed: each read owns
// an RNG stream derived from (seed, read index), so the result is identical
// for any thread count. threads = 0 picks hardware concurrency.
SampleSet metropolis_anneal(const IsingProblem& p, const AnnealSchedule& sched, int64_t reads,
                            uint64_t seed, int threads = 0);

// Exact Boltzmann distribution by exhaustive enumeration (n <= 24).
// State encoding: bit q of the state index set -> spin -1 on ids[q].
struct GibbsDistribution {
  std::vector<int> ids;
  double beta = 0;
  std::vector<double> prob;          // size 2^n
  double ground_energy = 0;
  std::vector<uint32_t> ground_states;

  std::vector<int8_t> spins_of(uint32_t state) const;
  static uint32_t state_of(std::span<const int8_t> spins);
};

GibbsDistribution exact_gibbs(const IsingProblem& p, double beta);

// Exact Gibbs observables for a compiled chain via transfer-matrix
// contraction over 16-state group blocks; exact for any chain length.
struct ChainGibbsResult {
  double ground_energy = 0;
  int64_t ground_degeneracy = 0;
  double ground_prob = 0;                          // total weight of the ground manifold
  double log_partition = 0;                        // log Z
  std::vector<std::array<double, 16>> group_marginals;
};

ChainGibbsResult chain_gibbs_dp(const EncodedChain& chain, double beta);

// Same, reconstructing the group structure from a map-compiled problem;
// rejects inputs whose logical coupling graph is not a simple path.
ChainGibbsResult chain_gibbs_dp(const PhysicalProblem& phys, const EncodingMap& map,
                                const IsingProblem& logical, double beta);

// JSON-lines persistence: a header record, then one record per distinct
// configuration {bits, count, energy} with '0' = spin +1.
void write_jsonl(const SampleSet& s, std::ostream& out);
SampleSet read_jsonl(std::istream& in);

}  // namespace qac
