#include "qac/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "qac/errors.hpp"
#include "qac/kernels.hpp"
#include "qac/rng.hpp"

namespace qac {

std::vector<double> AnnealSchedule::betas() const {
  validate();
  std::vector<double> out(sweeps);
  if (sweeps == 1) {
    out[0] = beta_end;
    return out;
  }
  for (int t = 0; t < sweeps; ++t)
    out[t] = beta_start + (beta_end - beta_start) * double(t) / double(sweeps - 1);
  return out;
}

void AnnealSchedule::validate() const {
  if (!(beta_start <= beta_end)) fail(ErrorKind::InvalidInput, "beta_start must be <= beta_end");
  if (sweeps < 1) fail(ErrorKind::InvalidInput, "sweeps must be >= 1");
  if (!(beta_start >= 0)) fail(ErrorKind::InvalidInput, "beta must be non-negative");
}

int64_t SampleSet::total_count() const {
  int64_t n = 0;
  for (const auto& e : entries) n += e.count;
  return n;
}

SampleSet metropolis_anneal(const IsingProblem& p, const AnnealSchedule& sched, int64_t reads,
                            uint64_t seed, int threads) {
  sched.validate();
  if (reads < 1) fail(ErrorKind::InvalidInput, "reads must be >= 1");
  if (p.size() == 0) fail(ErrorKind::InvalidInput, "empty problem");

  const auto dense = kernels::densify(p);
  const auto view = dense.view();
  const auto betas = sched.betas();
  const bool use_tables = kernels::tables_supported(view);
  kernels::AcceptTables tables;
  if (use_tables) tables = kernels::build_accept_tables(view, betas);
  const auto& kern = kernels::active_kernels();

  const int n = p.size();
  const int64_t blocks = (reads + kernels::kLanes - 1) / kernels::kLanes;
  std::vector<int8_t> all(size_t(reads) * n);

  auto run_blocks = [&](int64_t b0, int64_t b1) {
    for (int64_t b = b0; b < b1; ++b) {
      kernels::MetropolisBlockArgs args;
      args.problem = view;
      args.tables = use_tables ? &tables : nullptr;
      args.betas = betas.data();
      args.sweeps = sched.sweeps;
      args.seed = seed;
      args.first_read = uint64_t(b) * kernels::kLanes;
      args.lanes = int(std::min<int64_t>(kernels::kLanes, reads - args.first_read));
      args.out = all.data() + size_t(args.first_read) * n;
      if (use_tables)
        kern.metropolis_block(args);
      else
        kernels::metropolis_block_generic(args);
    }
  };

  int nthreads = threads > 0 ? threads : int(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, int(blocks)));
  if (nthreads == 1) {
    run_blocks(0, blocks);
  } else {
    std::vector<std::future<void>> futs;
    int64_t chunk = (blocks + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      int64_t b0 = t * chunk, b1 = std::min(blocks, b0 + chunk);
      if (b0 >= b1) break;
      futs.push_back(std::async(std::launch::async, run_blocks, b0, b1));
    }
    for (auto& f : futs) f.get();
  }

  // Deduplicate; the ordered map gives entries sorted by configuration, so
  // the result is independent of the read/thread processing order.
  std::map<std::vector<int8_t>, int64_t> hist;
  std::vector<int8_t> cfg(n);
  for (int64_t r = 0; r < reads; ++r) {
    cfg.assign(all.begin() + size_t(r) * n, all.begin() + size_t(r + 1) * n);
    ++hist[cfg];
  }

  SampleSet out;
  out.qubit_ids = p.ids();
  out.reads = reads;
  out.seed = seed;
  {
    std::ostringstream d;
    d << "metropolis(beta " << sched.beta_start << "->" << sched.beta_end
      << ", sweeps=" << sched.sweeps << ")";
    out.sampler = d.str();
  }
  out.entries.reserve(hist.size());
  for (auto& [spins, count] : hist) {
    SampleEntry e;
    e.spins = spins;
    e.count = count;
    e.energy = ising_energy(p, e.spins);
    out.entries.push_back(std::move(e));
  }
  return out;
}

namespace {

// Compensated (Neumaier) accumulation for the big enumeration sums.
struct CompensatedSum {
  double sum = 0, c = 0;
  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      c += (sum - t) + v;
    else
      c += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

}  // namespace

std::vector<int8_t> GibbsDistribution::spins_of(uint32_t state) const {
  std::vector<int8_t> s(ids.size());
  for (size_t q = 0; q < ids.size(); ++q) s[q] = (state >> q) & 1 ? int8_t{-1} : int8_t{1};
  return s;
}

uint32_t GibbsDistribution::state_of(std::span<const int8_t> spins) {
  uint32_t st = 0;
  for (size_t q = 0; q < spins.size(); ++q)
    if (spins[q] < 0) st |= uint32_t{1} << q;
  return st;
}

GibbsDistribution exact_gibbs(const IsingProblem& p, double beta) {
  const int n = p.size();
  if (n < 1) fail(ErrorKind::InvalidInput, "empty problem");
  if (n > 24) fail(ErrorKind::SizeLimit, "exact enumeration limited to 24 vertices");
  if (!(beta >= 0)) fail(ErrorKind::InvalidInput, "beta must be non-negative");

  const auto dense = kernels::densify(p);
  const auto view = dense.view();
  const auto& kern = kernels::active_kernels();
  const size_t total = size_t{1} << n;

  GibbsDistribution g;
  g.ids = p.ids();
  g.beta = beta;
  g.prob.resize(total);

  // Energies in chunks through the batch kernel (canonical fma order).
  std::vector<double>& energies = g.prob;  // reuse the buffer
  constexpr size_t kChunk = 4096;
  std::vector<int8_t> spins(kChunk * n);
  for (size_t base = 0; base < total; base += kChunk) {
    size_t m = std::min(kChunk, total - base);
    for (size_t i = 0; i < m; ++i) {
      uint32_t state = uint32_t(base + i);
      for (int q = 0; q < n; ++q)
        spins[i * n + q] = (state >> q) & 1 ? int8_t{-1} : int8_t{1};
    }
    kern.energy_batch(view, spins.data(), int(m), energies.data() + base);
  }

  double e0 = *std::min_element(energies.begin(), energies.end());
  g.ground_energy = e0;
  for (size_t s = 0; s < total; ++s)
    if (energies[s] == e0) g.ground_states.push_back(uint32_t(s));

  CompensatedSum z;
  for (size_t s = 0; s < total; ++s) {
    double w = std::exp(-beta * (energies[s] - e0));
    g.prob[s] = w;  // overwrites the energy in place
    z.add(w);
  }
  double zz = z.value();
  for (auto& w : g.prob) w /= zz;
  return g;
}

namespace {

constexpr int kGroupStates = 16;

struct ChainBlocks {
  int groups = 0;
  std::vector<std::array<double, kGroupStates>> node;               // per-group energies
  std::vector<std::array<double, kGroupStates * kGroupStates>> link;  // between i and i+1
};

// Decomposes a compiled chain problem into per-group (16-state) energy blocks
// and adjacent-group interaction blocks. Spin bit b of a group state refers
// to group slot b (data order, penalty qubit in slot 3 for Pudenz313);
// bit set -> spin -1.
ChainBlocks chain_blocks(const IsingProblem& prob,
                         const std::vector<std::array<int, 4>>& group_data,
                         const std::vector<int>& group_penalty, CodeKind code) {
  const int G = int(group_data.size());
  if (G < 1) fail(ErrorKind::InvalidInput, "empty chain");
  const int dc = data_count(code);

  std::vector<int> group_of(prob.size(), -1), slot_of(prob.size(), -1);
  for (int g = 0; g < G; ++g) {
    for (int k = 0; k < dc; ++k) {
      int idx = group_data[g][k];
      if (idx < 0) fail(ErrorKind::InvalidInput, "group qubit missing from problem");
      group_of[idx] = g;
      slot_of[idx] = k;
    }
    if (group_penalty[g] >= 0) {
      group_of[group_penalty[g]] = g;
      slot_of[group_penalty[g]] = 3;
    }
  }
  for (int i = 0; i < prob.size(); ++i)
    if (group_of[i] < 0)
      fail(ErrorKind::Unsupported, "problem has qubits outside the chain groups");

  ChainBlocks b;
  b.groups = G;
  b.node.assign(G, {});
  b.link.assign(std::max(0, G - 1), {});

  auto spin = [](int state, int slot) { return (state >> slot) & 1 ? -1.0 : 1.0; };

  for (int i = 0; i < prob.size(); ++i) {
    double h = prob.fields()[i];
    if (h == 0.0) continue;
    int g = group_of[i], sl = slot_of[i];
    for (int st = 0; st < kGroupStates; ++st) b.node[g][st] += h * spin(st, sl);
  }
  for (const auto& c : prob.couplings()) {
    int ga = group_of[c.a], gb = group_of[c.b];
    int sa = slot_of[c.a], sb = slot_of[c.b];
    if (ga == gb) {
      for (int st = 0; st < kGroupStates; ++st) b.node[ga][st] += c.j * spin(st, sa) * spin(st, sb);
    } else if (std::abs(ga - gb) == 1) {
      int lo = std::min(ga, gb);
      int slo = ga < gb ? sa : sb, shi = ga < gb ? sb : sa;
      for (int s1 = 0; s1 < kGroupStates; ++s1)
        for (int s2 = 0; s2 < kGroupStates; ++s2)
          b.link[lo][s1 * kGroupStates + s2] += c.j * spin(s1, slo) * spin(s2, shi);
    } else {
      fail(ErrorKind::Unsupported, "coupling between non-adjacent groups: not a chain");
    }
  }
  return b;
}

ChainGibbsResult chain_dp(const ChainBlocks& b, double beta) {
  const int G = b.groups;
  ChainGibbsResult r;

  // Ground energy and degeneracy by min-plus DP.
  {
    std::array<double, kGroupStates> best{};
    std::array<int64_t, kGroupStates> mult{};
    for (int s = 0; s < kGroupStates; ++s) {
      best[s] = b.node[0][s];
      mult[s] = 1;
    }
    for (int g = 1; g < G; ++g) {
      std::array<double, kGroupStates> nbest{};
      std::array<int64_t, kGroupStates> nmult{};
      for (int s2 = 0; s2 < kGroupStates; ++s2) {
        double bb = std::numeric_limits<double>::infinity();
        int64_t mm = 0;
        for (int s1 = 0; s1 < kGroupStates; ++s1) {
          double e = best[s1] + b.link[g - 1][s1 * kGroupStates + s2];
          if (e < bb) {
            bb = e;
            mm = mult[s1];
          } else if (e == bb) {
            mm += mult[s1];
          }
        }
        nbest[s2] = bb + b.node[g][s2];
        nmult[s2] = mm;
      }
      best = nbest;
      mult = nmult;
    }
    r.ground_energy = *std::min_element(best.begin(), best.end());
    r.ground_degeneracy = 0;
    for (int s = 0; s < kGroupStates; ++s)
      if (best[s] == r.ground_energy) r.ground_degeneracy += mult[s];
  }

  // Forward/backward passes on shifted weights, rescaled per step.
  auto node_w = [&](int g, int s, double ref) { return std::exp(-beta * (b.node[g][s] - ref)); };
  std::vector<double> node_ref(G), link_ref(std::max(0, G - 1));
  for (int g = 0; g < G; ++g)
    node_ref[g] = *std::min_element(b.node[g].begin(), b.node[g].end());
  for (int g = 0; g + 1 < G; ++g)
    link_ref[g] = *std::min_element(b.link[g].begin(), b.link[g].end());

  std::vector<std::array<double, kGroupStates>> fwd(G), bwd(G);
  double log_scale = 0;
  for (int s = 0; s < kGroupStates; ++s) fwd[0][s] = node_w(0, s, node_ref[0]);
  for (int g = 1; g < G; ++g) {
    double m = *std::max_element(fwd[g - 1].begin(), fwd[g - 1].end());
    for (auto& v : fwd[g - 1]) v /= m;
    log_scale += std::log(m);
    for (int s2 = 0; s2 < kGroupStates; ++s2) {
      double acc = 0;
      for (int s1 = 0; s1 < kGroupStates; ++s1)
        acc += fwd[g - 1][s1] *
               std::exp(-beta * (b.link[g - 1][s1 * kGroupStates + s2] - link_ref[g - 1]));
      fwd[g][s2] = acc * node_w(g, s2, node_ref[g]);
    }
  }
  double tail = 0;
  for (int s = 0; s < kGroupStates; ++s) tail += fwd[G - 1][s];
  double shift = 0;
  for (double v : node_ref) shift += v;
  for (double v : link_ref) shift += v;
  r.log_partition = std::log(tail) + log_scale - beta * shift;

  for (int s = 0; s < kGroupStates; ++s) bwd[G - 1][s] = 1.0;
  for (int g = G - 2; g >= 0; --g) {
    double m = *std::max_element(bwd[g + 1].begin(), bwd[g + 1].end());
    std::array<double, kGroupStates> scaled = bwd[g + 1];
    for (auto& v : scaled) v /= m;
    for (int s1 = 0; s1 < kGroupStates; ++s1) {
      double acc = 0;
      for (int s2 = 0; s2 < kGroupStates; ++s2)
        acc += std::exp(-beta * (b.link[g][s1 * kGroupStates + s2] - link_ref[g])) *
               node_w(g + 1, s2, node_ref[g + 1]) * scaled[s2];
      bwd[g][s1] = acc;
    }
  }

  r.group_marginals.resize(G);
  for (int g = 0; g < G; ++g) {
    double z = 0;
    for (int s = 0; s < kGroupStates; ++s) {
      r.group_marginals[g][s] = fwd[g][s] * bwd[g][s];
      z += r.group_marginals[g][s];
    }
    for (auto& v : r.group_marginals[g]) v /= z;
  }

  r.ground_prob =
      std::exp(std::log(double(r.ground_degeneracy)) - beta * r.ground_energy - r.log_partition);
  return r;
}

}  // namespace

ChainGibbsResult chain_gibbs_dp(const EncodedChain& chain, double beta) {
  if (!(beta >= 0)) fail(ErrorKind::InvalidInput, "beta must be non-negative");
  auto blocks = chain_blocks(chain.phys.problem, chain.group_data, chain.group_penalty, chain.code);
  return chain_dp(blocks, beta);
}

ChainGibbsResult chain_gibbs_dp(const PhysicalProblem& phys, const EncodingMap& map,
                                const IsingProblem& logical, double beta) {
  // Reconstruct the path order from the logical coupling graph.
  const int n = logical.size();
  std::vector<std::vector<int>> adj(n);
  for (const auto& c : logical.couplings()) {
    adj[c.a].push_back(c.b);
    adj[c.b].push_back(c.a);
  }
  int start = -1, ends = 0;
  for (int v = 0; v < n; ++v) {
    if (adj[v].size() > 2) fail(ErrorKind::Unsupported, "logical graph is not a path");
    if (adj[v].size() <= 1) {
      ++ends;
      if (start < 0) start = v;
    }
  }
  if (n > 1 && (ends != 2 || start < 0))
    fail(ErrorKind::Unsupported, "logical graph is not a simple path");
  std::vector<int> order;
  std::vector<char> seen(n, 0);
  int cur = n == 1 ? 0 : start;
  while (cur >= 0) {
    order.push_back(cur);
    seen[cur] = 1;
    int nxt = -1;
    for (int w : adj[cur])
      if (!seen[w]) nxt = w;
    cur = nxt;
  }
  if (int(order.size()) != n) fail(ErrorKind::Unsupported, "logical graph is disconnected");

  std::vector<std::array<int, 4>> group_data(n, {-1, -1, -1, -1});
  std::vector<int> group_penalty(n, -1);
  for (int i = 0; i < n; ++i) {
    int v = logical.ids()[order[i]];
    for (int k = 0; k < data_count(map.code); ++k)
      group_data[i][k] = phys.problem.index_of(map.data[v][k]);
    if (map.penalty[v] >= 0) group_penalty[i] = phys.problem.index_of(map.penalty[v]);
  }
  auto blocks = chain_blocks(phys.problem, group_data, group_penalty, map.code);
  return chain_dp(blocks, beta);
}

void write_jsonl(const SampleSet& s, std::ostream& out) {
  nlohmann::json header{{"qubits", s.qubit_ids},
                        {"reads", s.reads},
                        {"seed", s.seed},
                        {"sampler", s.sampler}};
  out << header.dump() << '\n';
  for (const auto& e : s.entries) {
    std::string bits(e.spins.size(), '0');
    for (size_t i = 0; i < e.spins.size(); ++i) bits[i] = e.spins[i] < 0 ? '1' : '0';
    nlohmann::json rec{{"bits", bits}, {"count", e.count}, {"energy", e.energy}};
    out << rec.dump() << '\n';
  }
}

SampleSet read_jsonl(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Io, "empty sample stream");
  auto header = nlohmann::json::parse(line);
  SampleSet s;
  s.qubit_ids = header.at("qubits").get<std::vector<int>>();
  s.reads = header.at("reads").get<int64_t>();
  s.seed = header.at("seed").get<uint64_t>();
  s.sampler = header.at("sampler").get<std::string>();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto rec = nlohmann::json::parse(line);
    SampleEntry e;
    auto bits = rec.at("bits").get<std::string>();
    e.spins.resize(bits.size());
    for (size_t i = 0; i < bits.size(); ++i) e.spins[i] = bits[i] == '1' ? int8_t{-1} : int8_t{1};
    e.count = rec.at("count").get<int64_t>();
    e.energy = rec.at("energy").get<double>();
    s.entries.push_back(std::move(e));
  }
  return s;
}

}  // namespace qac
