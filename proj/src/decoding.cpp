#include "qac/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "qac/errors.hpp"

namespace qac {

const char* scheme_name(DecodeScheme s) {
  switch (s) {
    case DecodeScheme::MajorityVote: return "MV";
    case DecodeScheme::CoinToss: return "CT";
    case DecodeScheme::EnergyMin: return "EM";
  }
  return "?";
}

Vote group_vote(CodeKind code, std::span<const int8_t> data_spins) {
  if (static_cast<int>(data_spins.size()) != data_count(code))
    fail(ErrorKind::InvalidInput, "vote expects " + std::to_string(data_count(code)) +
                                      " data spins, got " + std::to_string(data_spins.size()));
  int sum = 0;
  for (int8_t s : data_spins) sum += s;
  if (sum > 0) return Vote::Plus;
  if (sum < 0) return Vote::Minus;
  return Vote::Tie;  // only reachable for the even-sized code
}

std::vector<int8_t> decode_ct(std::span<const int8_t> voted, std::span<const int> ties,
                              Xoshiro256pp& rng) {
  std::vector<int8_t> out(voted.begin(), voted.end());
  for (int idx : ties) out[idx] = rng.next_sign();
  return out;
}

std::vector<int8_t> decode_em(const IsingProblem& logical, std::span<const int8_t> voted,
                              std::span<const int> ties, int cluster_bound) {
  const int n = logical.size();
  if (static_cast<int>(voted.size()) != n)
    fail(ErrorKind::InvalidInput, "voted configuration size mismatch");

  std::vector<int8_t> out(voted.begin(), voted.end());
  if (ties.empty()) return out;

  std::vector<uint8_t> tied(n, 0);
  for (int idx : ties) tied[idx] = 1;

  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& c : logical.couplings()) {
    adj[c.a].push_back({c.b, c.j});
    adj[c.b].push_back({c.a, c.j});
  }

  // Connected components of tied vertices through logical couplings.
  std::vector<uint8_t> seen(n, 0);
  for (int root : ties) {
    if (seen[root]) continue;
    std::vector<int> comp, stack{root};
    seen[root] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      comp.push_back(v);
      for (auto [w, j] : adj[v])
        if (tied[w] && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    std::sort(comp.begin(), comp.end());
    const int k = static_cast<int>(comp.size());
    if (k > cluster_bound)
      fail(ErrorKind::SizeLimit,
           "tie cluster of size " + std::to_string(k) + " exceeds bound " +
               std::to_string(cluster_bound));

    std::vector<int> pos(n, -1);
    for (int i = 0; i < k; ++i) pos[comp[i]] = i;

    // Effective fields from the fixed neighbors, plus internal couplings.
    std::vector<double> heff(k, 0.0);
    std::vector<std::tuple<int, int, double>> internal;
    for (int i = 0; i < k; ++i) {
      int v = comp[i];
      heff[i] = logical.fields()[v];
      for (auto [w, j] : adj[v]) {
        if (tied[w]) {
          if (pos[w] > i) internal.push_back({i, pos[w], j});
        } else {
          heff[i] += j * double(out[w]);
        }
      }
    }

    // Enumerate assignments; vertex comp[i] maps to bit (k-1-i) so that
    // ascending masks scan assignments in lexicographic order (-1 < +1) and
    // the first strict minimum is the lexicographically smallest one.
    double best_e = 0;
    uint32_t best_mask = 0;
    bool have = false;
    for (uint32_t mask = 0; mask < (uint32_t{1} << k); ++mask) {
      auto spin = [&](int i) { return (mask >> (k - 1 - i)) & 1 ? 1.0 : -1.0; };
      double e = 0;
      for (int i = 0; i < k; ++i) e += heff[i] * spin(i);
      for (auto [i, jx, j] : internal) e += j * spin(i) * spin(jx);
      if (!have || e < best_e) {
        have = true;
        best_e = e;
        best_mask = mask;
      }
    }
    for (int i = 0; i < k; ++i)
      out[comp[i]] = (best_mask >> (k - 1 - i)) & 1 ? int8_t{1} : int8_t{-1};
  }
  return out;
}

GroupDecoder::GroupDecoder(CodeKind code, const EncodingMap& map, const IsingProblem& logical,
                           const std::vector<int>& qubit_ids)
    : code_(code), logical_(&logical) {
  auto pos_of = [&](int q) {
    auto it = std::lower_bound(qubit_ids.begin(), qubit_ids.end(), q);
    if (it == qubit_ids.end() || *it != q)
      fail(ErrorKind::InvalidInput, "configuration does not cover qubit " + std::to_string(q));
    return static_cast<int>(it - qubit_ids.begin());
  };
  group_data_.resize(logical.size());
  for (int i = 0; i < logical.size(); ++i) {
    int v = logical.ids()[i];
    group_data_[i] = {-1, -1, -1, -1};
    for (int k = 0; k < data_count(code); ++k) group_data_[i][k] = pos_of(map.data[v][k]);
  }
}

GroupDecoder::GroupDecoder(const EncodedChain& chain)
    : code_(chain.code), logical_(&chain.logical) {
  group_data_.resize(chain.path.size());
  // chain groups are in path order; reorder to the logical problem's dense order
  for (size_t i = 0; i < chain.path.size(); ++i) {
    int dense = chain.logical.index_of(chain.path[i]);
    group_data_[dense] = chain.group_data[i];
  }
}

std::vector<Vote> GroupDecoder::votes(std::span<const int8_t> phys) const {
  std::vector<Vote> out(group_data_.size());
  std::array<int8_t, 4> spins{};
  for (size_t v = 0; v < group_data_.size(); ++v) {
    for (int k = 0; k < data_count(code_); ++k) {
      int idx = group_data_[v][k];
      if (idx < 0 || idx >= static_cast<int>(phys.size()))
        fail(ErrorKind::InvalidInput, "physical configuration does not cover all mapped qubits");
      spins[k] = phys[idx];
    }
    out[v] = group_vote(code_, std::span<const int8_t>(spins.data(), data_count(code_)));
  }
  return out;
}

DecodeOutcome GroupDecoder::decode(std::span<const int8_t> phys, DecodeScheme scheme,
                                   Xoshiro256pp* rng) const {
  if (code_ == CodeKind::Pudenz313 && scheme != DecodeScheme::MajorityVote)
    fail(ErrorKind::Scheme, "tie-handling schemes apply to the square code only");
  if (code_ == CodeKind::Square414 && scheme == DecodeScheme::MajorityVote)
    fail(ErrorKind::Scheme, "plain majority vote is undefined for the square code (ties)");

  auto vs = votes(phys);
  DecodeOutcome o;
  o.scheme = scheme;
  o.logical.resize(vs.size());
  for (size_t v = 0; v < vs.size(); ++v) {
    o.logical[v] = static_cast<int8_t>(vs[v]);
    if (vs[v] == Vote::Tie) o.ties.push_back(static_cast<int>(v));
  }

  switch (scheme) {
    case DecodeScheme::MajorityVote:
      break;  // Pudenz313 never ties
    case DecodeScheme::CoinToss:
      if (!rng) fail(ErrorKind::InvalidInput, "coin-toss decoding needs a seeded rng");
      o.logical = decode_ct(o.logical, o.ties, *rng);
      break;
    case DecodeScheme::EnergyMin:
      o.logical = decode_em(*logical_, o.logical, o.ties);
      break;
  }
  o.logical_energy = ising_energy(*logical_, o.logical);
  return o;
}

DecodeOutcome decode_sample(CodeKind code, const EncodingMap& map,
                            const std::vector<int>& qubit_ids, std::span<const int8_t> phys,
                            DecodeScheme scheme, const IsingProblem& logical, Xoshiro256pp* rng) {
  return GroupDecoder(code, map, logical, qubit_ids).decode(phys, scheme, rng);
}

void write_jsonl_decoded(const SampleSet& s, std::span<const DecodeOutcome> outcomes,
                         std::ostream& out) {
  if (outcomes.size() != s.entries.size())
    fail(ErrorKind::InvalidInput, "one decode outcome per sample entry required");
  nlohmann::json header{{"qubits", s.qubit_ids},
                        {"reads", s.reads},
                        {"seed", s.seed},
                        {"sampler", s.sampler}};
  out << header.dump() << '\n';
  for (size_t i = 0; i < s.entries.size(); ++i) {
    const auto& e = s.entries[i];
    const auto& d = outcomes[i];
    std::string bits(e.spins.size(), '0');
    for (size_t q = 0; q < e.spins.size(); ++q) bits[q] = e.spins[q] < 0 ? '1' : '0';
    std::string lbits(d.logical.size(), '0');
    for (size_t v = 0; v < d.logical.size(); ++v) lbits[v] = d.logical[v] < 0 ? '1' : '0';
    nlohmann::json rec{{"bits", bits},
                       {"count", e.count},
                       {"energy", e.energy},
                       {"logical_bits", lbits},
                       {"ties", d.ties.size()},
                       {"scheme", scheme_name(d.scheme)}};
    out << rec.dump() << '\n';
  }
}

}  // namespace qac
