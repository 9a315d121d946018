#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qac/encoding.hpp"
#include "qac/rng.hpp"
#include "qac/sampling.hpp"

namespace qac {

enum class Vote : int8_t { Minus = -1, Tie = 0, Plus = 1 };

// Majority vote over one encoded group's data qubits. Square414 votes all
// four data qubits and can tie; Pudenz313 votes the three data qubits (the
// penalty qubit is excluded) and never ties.
Vote group_vote(CodeKind code, std::span<const int8_t> data_spins);

enum class DecodeScheme { MajorityVote, CoinToss, EnergyMin };
const char* scheme_name(DecodeScheme s);

struct DecodeOutcome {
  std::vector<int8_t> logical;   // ±1 per logical vertex (problem id order)
  std::vector<int> ties;         // dense indices of vertices that tied
  DecodeScheme scheme = DecodeScheme::MajorityVote;
  double logical_energy = 0;
};

// Tie resolution by unbiased coin per tied vertex.
std::vector<int8_t> decode_ct(std::span<const int8_t> voted, std::span<const int> ties,
                              Xoshiro256pp& rng);

// Tie resolution by exact energy minimization: tied vertices form clusters
// (connected components through logical couplings); each cluster of size <=
// cluster_bound is solved by enumeration against the effective fields from
// the fixed vertices. Equal-energy minima resolve to the lexicographically
// smallest assignment (-1 before +1, vertices in dense order).
std::vector<int8_t> decode_em(const IsingProblem& logical, std::span<const int8_t> voted,
                              std::span<const int> ties, int cluster_bound = 20);

// Per-sample decoder bound to a code, an encoding map, a logical problem and
// the qubit order of the physical configurations.
class GroupDecoder {
 public:
  GroupDecoder(CodeKind code, const EncodingMap& map, const IsingProblem& logical,
               const std::vector<int>& qubit_ids);
  explicit GroupDecoder(const EncodedChain& chain);

  // Vote + tie resolution per scheme. MajorityVote is valid only for
  // Pudenz313, CoinToss/EnergyMin only for Square414. CoinToss needs rng.
  DecodeOutcome decode(std::span<const int8_t> phys, DecodeScheme scheme,
                       Xoshiro256pp* rng = nullptr) const;

  // The per-vertex vote stage alone.
  std::vector<Vote> votes(std::span<const int8_t> phys) const;

  int n_vertices() const { return static_cast<int>(group_data_.size()); }

 private:
  CodeKind code_;
  const IsingProblem* logical_;
  std::vector<std::array<int, 4>> group_data_;  // dense indices into phys configs
};

DecodeOutcome decode_sample(CodeKind code, const EncodingMap& map,
                            const std::vector<int>& qubit_ids, std::span<const int8_t> phys,
                            DecodeScheme scheme, const IsingProblem& logical,
                            Xoshiro256pp* rng = nullptr);

// Appends decoded results to the sample records when persisting.
void write_jsonl_decoded(const SampleSet& s, std::span<const DecodeOutcome> outcomes,
                         std::ostream& out);

}  // namespace qac
