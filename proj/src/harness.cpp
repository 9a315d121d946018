#include "qac/harness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <set>
#include <sstream>
#include <thread>

#include "qac/errors.hpp"

namespace qac {

namespace {

GraphView make_view(int n, std::vector<uint8_t> eligible,
                    const std::vector<std::pair<int, int>>& edges) {
  GraphView v;
  v.n = n;
  v.eligible = std::move(eligible);
  v.adj_off.assign(n + 1, 0);
  for (auto [a, b] : edges) {
    ++v.adj_off[a + 1];
    ++v.adj_off[b + 1];
  }
  for (int i = 0; i < n; ++i) v.adj_off[i + 1] += v.adj_off[i];
  v.adj.resize(edges.size() * 2);
  std::vector<int> cur(v.adj_off.begin(), v.adj_off.end() - 1);
  for (auto [a, b] : edges) {
    v.adj[cur[a]++] = b;
    v.adj[cur[b]++] = a;
  }
  for (int i = 0; i < n; ++i)
    std::sort(v.adj.begin() + v.adj_off[i], v.adj.begin() + v.adj_off[i + 1]);
  return v;
}

}  // namespace

GraphView view_of(const HardwareGraph& g) {
  std::vector<uint8_t> eligible(g.total_qubits());
  for (int q = 0; q < g.total_qubits(); ++q) eligible[q] = g.active[q] ? 1 : 0;
  return make_view(g.total_qubits(), std::move(eligible), g.couplers);
}

GraphView view_of(const EncodedGraph& g) {
  std::vector<uint8_t> eligible(g.n);
  for (int v = 0; v < g.n; ++v) eligible[v] = g.functional(v) ? 1 : 0;
  return make_view(g.n, std::move(eligible), g.edges);
}

namespace {

// One self-avoiding-walk attempt; empty result on dead end.
std::vector<int> saw_attempt(const GraphView& view, std::span<const uint8_t> eligible, int length,
                             Xoshiro256pp& rng) {
  std::vector<int> pool;
  for (int v = 0; v < view.n; ++v)
    if (eligible[v]) pool.push_back(v);
  if (static_cast<int>(pool.size()) < length) return {};

  std::vector<uint8_t> used(view.n, 0);
  std::vector<int> chain;
  int cur = pool[rng.next_below(pool.size())];
  chain.push_back(cur);
  used[cur] = 1;
  while (static_cast<int>(chain.size()) < length) {
    std::vector<int> cands;
    for (int w : view.neighbors_of(cur))
      if (eligible[w] && !used[w]) cands.push_back(w);
    if (cands.empty()) return {};
    cur = cands[rng.next_below(cands.size())];
    chain.push_back(cur);
    used[cur] = 1;
  }
  return chain;
}

}  // namespace

ChainInstance place_random_chain(const GraphView& view, int length, uint64_t seed,
                                 int max_attempts) {
  if (length < 2) fail(ErrorKind::InvalidInput, "chain length must be >= 2");
  int eligible_count = 0;
  for (uint8_t e : view.eligible) eligible_count += e;
  if (length > eligible_count)
    fail(ErrorKind::Placement, "chain length " + std::to_string(length) +
                                   " exceeds eligible vertex count " +
                                   std::to_string(eligible_count));
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Xoshiro256pp rng = Xoshiro256pp::seeded(derive_seed(seed, attempt));
    auto chain = saw_attempt(view, view.eligible, length, rng);
    if (!chain.empty()) return {std::move(chain), seed};
  }
  fail(ErrorKind::Placement,
       "no placement of length " + std::to_string(length) + " found after " +
           std::to_string(max_attempts) + " attempts");
}

std::vector<ChainInstance> place_disjoint_chains(const GraphView& view, int copies, int length,
                                                 uint64_t seed, int max_attempts) {
  if (length < 2) fail(ErrorKind::InvalidInput, "chain length must be >= 2");
  std::vector<ChainInstance> out;
  std::vector<uint8_t> eligible = view.eligible;
  int attempt = 0;
  for (int c = 0; c < copies; ++c) {
    bool placed = false;
    while (attempt < max_attempts) {
      Xoshiro256pp rng = Xoshiro256pp::seeded(derive_seed(seed, attempt++));
      auto chain = saw_attempt(view, eligible, length, rng);
      if (!chain.empty()) {
        for (int v : chain) eligible[v] = 0;
        out.push_back({std::move(chain), seed});
        placed = true;
        break;
      }
    }
    if (!placed)
      fail(ErrorKind::Placement, "could not place " + std::to_string(copies) +
                                     " disjoint chains of length " + std::to_string(length));
  }
  return out;
}

Stats aggregate(std::span<const double> values) {
  if (values.size() < 2)
    fail(ErrorKind::Statistics, "aggregation needs at least 2 instances, got " +
                                    std::to_string(values.size()));
  double mean = 0;
  for (double v : values) mean += v;
  mean /= double(values.size());
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= double(values.size());
  return {mean, std::sqrt(var) / std::sqrt(double(values.size()))};
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::U: return "U";
    case Strategy::C: return "C";
    case Strategy::EP: return "EP";
    case Strategy::QacCT: return "QAC-CT";
    case Strategy::QacEM: return "QAC-EM";
    case Strategy::QacMV: return "QAC-MV";
  }
  return "?";
}

Strategy strategy_from_name(const std::string& name) {
  for (Strategy s : {Strategy::U, Strategy::C, Strategy::EP, Strategy::QacCT, Strategy::QacEM,
                     Strategy::QacMV})
    if (name == strategy_name(s)) return s;
  fail(ErrorKind::Validation, "unknown strategy '" + name + "'");
}

bool is_encoded(Strategy s) { return s != Strategy::U && s != Strategy::C; }

std::string SamplerSettings::describe() const {
  std::ostringstream o;
  if (backend == Backend::ExactGibbs) {
    o << "exact-gibbs(beta=" << gibbs_beta << ")";
  } else {
    o << "metropolis(beta " << schedule.beta_start << "->" << schedule.beta_end
      << ", sweeps=" << schedule.sweeps << ", reads=" << reads << ")";
  }
  return o.str();
}

namespace {

// Both degenerate chain ground states are alternating assignments.
bool alternating(std::span<const int8_t> spins, std::span<const int> positions) {
  for (size_t i = 1; i < positions.size(); ++i)
    if (spins[positions[i]] != -spins[positions[i - 1]]) return false;
  return true;
}

IsingProblem chain_over(std::span<const int> vertices, double alpha) {
  IsingProblem p;
  for (size_t i = 0; i + 1 < vertices.size(); ++i)
    p.add_coupling(vertices[i], vertices[i + 1], alpha);
  return p;
}

std::vector<int> dense_positions(const IsingProblem& p, std::span<const int> vertices) {
  std::vector<int> pos(vertices.size());
  for (size_t i = 0; i < vertices.size(); ++i) pos[i] = p.index_of(vertices[i]);
  return pos;
}

}  // namespace

double unprotected_success(const ChainInstance& chain, double alpha, const SamplerSettings& s,
                           uint64_t seed) {
  IsingProblem p = chain_over(chain.vertices, alpha);
  auto pos = dense_positions(p, chain.vertices);
  if (s.backend == SamplerSettings::Backend::ExactGibbs) {
    auto g = exact_gibbs(p, s.gibbs_beta);
    double acc = 0;
    for (size_t st = 0; st < g.prob.size(); ++st) {
      auto spins = g.spins_of(uint32_t(st));
      if (alternating(spins, pos)) acc += g.prob[st];
    }
    return acc;
  }
  auto samples = metropolis_anneal(p, s.schedule, s.reads, seed, s.threads);
  int64_t ok = 0;
  for (const auto& e : samples.entries)
    if (alternating(e.spins, pos)) ok += e.count;
  return double(ok) / double(samples.reads);
}

double classical_success(std::span<const ChainInstance> copies, double alpha,
                         const SamplerSettings& s, uint64_t seed,
                         std::array<double, 4>* per_copy) {
  if (copies.size() != 4) fail(ErrorKind::InvalidInput, "the C strategy runs four copies");
  std::set<int> used;
  size_t total = 0;
  for (const auto& c : copies) {
    used.insert(c.vertices.begin(), c.vertices.end());
    total += c.vertices.size();
  }
  if (used.size() != total) fail(ErrorKind::InvalidInput, "C-strategy placements overlap");

  // All four copies in one problem (one programming cycle); with no couplers
  // between copies their marginals are exactly independent.
  IsingProblem p;
  for (const auto& c : copies)
    for (size_t i = 0; i + 1 < c.vertices.size(); ++i)
      p.add_coupling(c.vertices[i], c.vertices[i + 1], alpha);
  std::array<std::vector<int>, 4> pos;
  for (int k = 0; k < 4; ++k) pos[k] = dense_positions(p, copies[k].vertices);

  std::array<double, 4> copy_acc{};
  double any_acc = 0;
  if (s.backend == SamplerSettings::Backend::ExactGibbs) {
    auto g = exact_gibbs(p, s.gibbs_beta);
    for (size_t st = 0; st < g.prob.size(); ++st) {
      auto spins = g.spins_of(uint32_t(st));
      bool any = false;
      for (int k = 0; k < 4; ++k) {
        bool ok = alternating(spins, pos[k]);
        if (ok) copy_acc[k] += g.prob[st];
        any |= ok;
      }
      if (any) any_acc += g.prob[st];
    }
  } else {
    auto samples = metropolis_anneal(p, s.schedule, s.reads, seed, s.threads);
    for (const auto& e : samples.entries) {
      bool any = false;
      for (int k = 0; k < 4; ++k) {
        bool ok = alternating(e.spins, pos[k]);
        if (ok) copy_acc[k] += double(e.count);
        any |= ok;
      }
      if (any) any_acc += double(e.count);
    }
    for (auto& v : copy_acc) v /= double(samples.reads);
    any_acc /= double(samples.reads);
  }
  if (per_copy) *per_copy = copy_acc;
  return any_acc;
}

namespace {

// The two faithful embeddings of the chain's degenerate ground states.
std::array<std::vector<int8_t>, 2> faithful_ground_states(const EncodedChain& chain) {
  const int n = chain.phys.problem.size();
  std::array<std::vector<int8_t>, 2> out;
  for (int which = 0; which < 2; ++which) {
    out[which].assign(n, 0);
    for (size_t g = 0; g < chain.path.size(); ++g) {
      int8_t s = ((g % 2 == 0) == (which == 0)) ? int8_t{1} : int8_t{-1};
      for (int k = 0; k < data_count(chain.code); ++k) out[which][chain.group_data[g][k]] = s;
      if (chain.group_penalty[g] >= 0) out[which][chain.group_penalty[g]] = s;
    }
  }
  return out;
}

bool logical_ground(std::span<const int8_t> logical, const EncodedChain& chain) {
  // logical is in the problem's dense (sorted id) order; walk the path.
  for (size_t i = 1; i < chain.path.size(); ++i) {
    int a = chain.logical.index_of(chain.path[i - 1]);
    int b = chain.logical.index_of(chain.path[i]);
    if (logical[b] != -logical[a]) return false;
  }
  return true;
}

DecodeScheme scheme_of(Strategy s) {
  switch (s) {
    case Strategy::QacCT: return DecodeScheme::CoinToss;
    case Strategy::QacEM: return DecodeScheme::EnergyMin;
    case Strategy::QacMV: return DecodeScheme::MajorityVote;
    default: fail(ErrorKind::Scheme, "strategy has no decoding scheme");
  }
}

}  // namespace

double scheme_success(const EncodedChain& chain, const SampleSet& samples, Strategy scheme,
                      uint64_t ct_seed) {
  if (scheme == Strategy::EP) {
    auto gs = faithful_ground_states(chain);
    int64_t ok = 0;
    for (const auto& e : samples.entries)
      if (e.spins == gs[0] || e.spins == gs[1]) ok += e.count;
    return double(ok) / double(samples.reads);
  }

  GroupDecoder dec(chain);
  DecodeScheme ds = scheme_of(scheme);
  int64_t ok = 0;
  for (size_t i = 0; i < samples.entries.size(); ++i) {
    const auto& e = samples.entries[i];
    if (ds == DecodeScheme::CoinToss) {
      auto vs = dec.votes(e.spins);
      bool has_tie = std::any_of(vs.begin(), vs.end(), [](Vote v) { return v == Vote::Tie; });
      if (!has_tie) {
        std::vector<int8_t> logical(vs.size());
        for (size_t v = 0; v < vs.size(); ++v) logical[v] = static_cast<int8_t>(vs[v]);
        if (logical_ground(logical, chain)) ok += e.count;
      } else {
        // coin per read within this entry
        Xoshiro256pp rng = Xoshiro256pp::seeded(derive_seed(ct_seed, i));
        for (int64_t r = 0; r < e.count; ++r) {
          auto out = dec.decode(e.spins, DecodeScheme::CoinToss, &rng);
          if (logical_ground(out.logical, chain)) ++ok;
        }
      }
    } else {
      auto out = dec.decode(e.spins, ds);
      if (logical_ground(out.logical, chain)) ok += e.count;
    }
  }
  return double(ok) / double(samples.reads);
}

double scheme_success_gibbs(const EncodedChain& chain, double beta, Strategy scheme) {
  auto g = exact_gibbs(chain.phys.problem, beta);
  if (scheme == Strategy::EP) {
    auto gs = faithful_ground_states(chain);
    return g.prob[GibbsDistribution::state_of(gs[0])] +
           g.prob[GibbsDistribution::state_of(gs[1])];
  }
  GroupDecoder dec(chain);
  DecodeScheme ds = scheme_of(scheme);
  double acc = 0;
  for (size_t st = 0; st < g.prob.size(); ++st) {
    if (g.prob[st] == 0) continue;
    auto spins = g.spins_of(uint32_t(st));
    if (ds == DecodeScheme::CoinToss) {
      // expected success over coin flips: fraction of tie completions landing
      // in a logical ground state
      auto vs = dec.votes(spins);
      std::vector<int> ties;
      std::vector<int8_t> logical(vs.size());
      for (size_t v = 0; v < vs.size(); ++v) {
        logical[v] = static_cast<int8_t>(vs[v]);
        if (vs[v] == Vote::Tie) ties.push_back(int(v));
      }
      int k = int(ties.size());
      int good = 0;
      for (uint32_t mask = 0; mask < (uint32_t{1} << k); ++mask) {
        for (int t = 0; t < k; ++t) logical[ties[t]] = (mask >> t) & 1 ? int8_t{1} : int8_t{-1};
        if (logical_ground(logical, chain)) ++good;
      }
      acc += g.prob[st] * double(good) / double(uint32_t{1} << k);
    } else {
      auto out = dec.decode(spins, ds);
      if (logical_ground(out.logical, chain)) acc += g.prob[st];
    }
  }
  return acc;
}

double encoded_success(const EncodedChain& chain, Strategy scheme, const SamplerSettings& s,
                       uint64_t seed) {
  if (s.backend == SamplerSettings::Backend::ExactGibbs)
    return scheme_success_gibbs(chain, s.gibbs_beta, scheme);
  auto samples = metropolis_anneal(chain.phys.problem, s.schedule, s.reads, seed, s.threads);
  return scheme_success(chain, samples, scheme, derive_seed(seed, 0xC7));
}

std::vector<InstanceSet> place_instances(Strategy strat, const GraphView& view, int length,
                                         int count, uint64_t seed) {
  std::vector<InstanceSet> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    uint64_t s = derive_seed(seed, i);
    if (strat == Strategy::C)
      out.push_back(place_disjoint_chains(view, 4, length, s));
    else
      out.push_back({place_random_chain(view, length, s)});
  }
  return out;
}

namespace {

double instance_success(Strategy strat, const EncodingMap* map, const InstanceSet& inst,
                        double alpha, std::optional<double> gamma, const SamplerSettings& s,
                        uint64_t seed) {
  switch (strat) {
    case Strategy::U:
      return unprotected_success(inst.at(0), alpha, s, seed);
    case Strategy::C:
      return classical_success(inst, alpha, s, seed);
    default: {
      if (!map) fail(ErrorKind::InvalidInput, "encoded strategies need an encoding map");
      if (!gamma) fail(ErrorKind::InvalidInput, "encoded strategies need gamma");
      auto chain = compile_chain(*map, inst.at(0).vertices, alpha, *gamma);
      return encoded_success(chain, strat, s, seed);
    }
  }
}

}  // namespace

StrategyOutcome run_strategy(Strategy strat, const EncodingMap* map,
                             std::span<const InstanceSet> instances, double alpha,
                             std::optional<double> gamma, const SamplerSettings& s, uint64_t seed,
                             int threads) {
  StrategyOutcome o;
  o.strategy = strat;
  o.alpha = alpha;
  o.gamma = is_encoded(strat) ? gamma : std::nullopt;
  o.chain_length = instances.empty() ? 0 : int(instances[0].at(0).vertices.size());
  o.per_instance.resize(instances.size());

  // Parallel across instances; each sampler run stays single-threaded.
  SamplerSettings inner = s;
  inner.threads = 1;
  int nthreads = threads > 0 ? threads : int(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, int(instances.size())));

  auto run_range = [&](size_t i0, size_t i1) {
    for (size_t i = i0; i < i1; ++i)
      o.per_instance[i] =
          instance_success(strat, map, instances[i], alpha, gamma, inner, derive_seed(seed, i));
  };
  if (nthreads <= 1) {
    run_range(0, instances.size());
  } else {
    std::vector<std::future<void>> futs;
    size_t chunk = (instances.size() + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      size_t i0 = t * chunk, i1 = std::min(instances.size(), i0 + chunk);
      if (i0 >= i1) break;
      futs.push_back(std::async(std::launch::async, run_range, i0, i1));
    }
    for (auto& f : futs) f.get();
  }
  o.stats = aggregate(o.per_instance);
  return o;
}

SweepResult sweep_gamma(Strategy strat, const EncodingMap& map,
                        std::span<const InstanceSet> instances, double alpha,
                        std::span<const double> gamma_grid, const SamplerSettings& s,
                        uint64_t seed, int threads) {
  if (gamma_grid.empty()) fail(ErrorKind::InvalidInput, "empty gamma grid");
  if (!is_encoded(strat)) fail(ErrorKind::InvalidInput, "gamma sweeps apply to encoded strategies");
  SweepResult r;
  r.surface.reserve(gamma_grid.size());
  for (size_t gi = 0; gi < gamma_grid.size(); ++gi)
    r.surface.push_back(run_strategy(strat, &map, instances, alpha, gamma_grid[gi], s,
                                     derive_seed(seed, gi), threads));
  size_t best = 0;
  for (size_t gi = 1; gi < gamma_grid.size(); ++gi)
    if (r.surface[gi].stats.mean > r.surface[best].stats.mean) best = gi;  // ties keep smaller
  r.gamma_opt = gamma_grid[best];
  return r;
}

EqualizedAlphas equalized_alphas(double alpha) {
  if (!(alpha > 0)) fail(ErrorKind::InvalidInput, "alpha must be positive");
  double square = 1.5 * alpha;
  if (square > 1.0)
    fail(ErrorKind::InvalidInput,
         "equalized mode needs 1.5*alpha <= 1 so the square code stays programmable");
  return {alpha, square};
}

}  // namespace qac
