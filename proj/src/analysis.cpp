#include "qac/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>

#include "qac/errors.hpp"
#include "qac/harness.hpp"
#include "qac/topology.hpp"

namespace qac {

namespace {

// Penalty couplers over group slots. Square414: the intra-cell 4-cycle over
// slots (0,1),(0,2),(1,3),(2,3). Pudenz313: data slot k to the penalty slot 3.
std::vector<std::pair<int, int>> slot_penalty_edges(CodeKind code) {
  if (code == CodeKind::Square414) return {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  return {{0, 3}, {1, 3}, {2, 3}};
}

// Relabelings under which single-group states are equivalent. For Pudenz313
// any permutation of the three data slots; for Square414 the reflections of
// the penalty cycle that preserve the two opposite pairs {0,3} and {1,2}
// (those pairs carry distinct roles in the encoded lattice).
std::vector<std::array<int, 4>> slot_symmetries(CodeKind code) {
  if (code == CodeKind::Square414)
    return {{0, 1, 2, 3}, {1, 0, 3, 2}, {2, 3, 0, 1}, {3, 2, 1, 0}};
  std::vector<std::array<int, 4>> out;
  std::array<int, 3> perm{0, 1, 2};
  do {
    out.push_back({perm[0], perm[1], perm[2], 3});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

int popcount4(int bits) { return __builtin_popcount(unsigned(bits) & 0xF); }

char vote_char(Vote v) { return v == Vote::Plus ? 'y' : (v == Vote::Minus ? 'n' : 't'); }

}  // namespace

std::vector<CodeStateRow> enumerate_code_states(CodeKind code) {
  const int dc = data_count(code);
  const int nq = dc + penalty_count(code);  // 4 for both codes
  const auto pen_edges = slot_penalty_edges(code);
  const auto syms = slot_symmetries(code);

  auto bit_of = [](int state, int slot) { return (state >> (3 - slot)) & 1; };
  auto canonical = [&](int state) {
    int best = state;
    for (const auto& perm : syms) {
      int img = 0;
      for (int slot = 0; slot < nq; ++slot)
        if (bit_of(state, slot)) img |= 1 << (3 - perm[slot]);
      best = std::min(best, img);
    }
    return best;
  };

  std::map<int, CodeStateRow> rows;  // canonical representative -> row
  for (int state = 0; state < (1 << nq); ++state) {
    int canon = canonical(state);
    auto& row = rows[canon];
    if (++row.multiplicity > 1) continue;

    std::array<int8_t, 4> spins{1, 1, 1, 1};
    for (int slot = 0; slot < nq; ++slot) {
      row.bits[slot] = int8_t(bit_of(canon, slot));
      if (row.bits[slot]) spins[slot] = -1;
    }
    int violated = 0;
    for (auto [a, b] : pen_edges) violated += spins[a] != spins[b];
    row.penalty_2v = 2 * violated;
    row.magnetization = -(spins[0] + spins[1] + spins[2] + spins[3]);
    row.decodability =
        vote_char(group_vote(code, std::span<const int8_t>(spins.data(), dc)));
  }

  std::vector<CodeStateRow> out;
  for (auto& [canon, row] : rows) out.push_back(row);
  std::sort(out.begin(), out.end(), [&](const CodeStateRow& a, const CodeStateRow& b) {
    auto key = [&](const CodeStateRow& r) {
      int flips = 0, rep = 0;
      for (int s = 0; s < 4; ++s) {
        rep = rep * 2 + r.bits[s];
        if (s < dc) flips += r.bits[s];
      }
      int pen_bit = penalty_count(code) ? r.bits[3] : 0;
      return std::tuple(pen_bit, flips, rep);
    };
    return key(a) < key(b);
  });
  return out;
}

namespace {

// 16-state Boltzmann sums; tied states contribute half to each side.
// Energy of a state: 2 v gamma + htilde * m_data with m_data = -sum of the
// data spins, so the all-up ground state sits at -n_data * htilde.
std::pair<double, double> thermo_weights_enumerated(CodeKind code, double beta, double h,
                                                    double gamma) {
  const int dc = data_count(code);
  const double htilde = h * data_field_weight(code);
  const auto pen_edges = slot_penalty_edges(code);
  const int nq = dc + penalty_count(code);
  double w_err = 0, w_ok = 0;
  for (int state = 0; state < (1 << nq); ++state) {
    std::array<int8_t, 4> spins{1, 1, 1, 1};
    for (int slot = 0; slot < nq; ++slot)
      if ((state >> slot) & 1) spins[slot] = -1;
    int violated = 0;
    for (auto [a, b] : pen_edges) violated += spins[a] != spins[b];
    int m_data = 0;
    for (int k = 0; k < dc; ++k) m_data -= spins[k];
    double w = std::exp(-beta * (2.0 * violated * gamma + htilde * m_data));
    switch (vote_char(group_vote(code, std::span<const int8_t>(spins.data(), dc)))) {
      case 'y': w_ok += w; break;
      case 'n': w_err += w; break;
      default:
        w_err += 0.5 * w;
        w_ok += 0.5 * w;
    }
  }
  return {w_err, w_ok};
}

}  // namespace

double thermo_error_prob_enumerated(CodeKind code, double beta, double h, double gamma) {
  auto [w, wp] = thermo_weights_enumerated(code, beta, h, gamma);
  return w / (w + wp);
}

double thermo_error_prob(CodeKind code, double beta, double h, double gamma) {
  if (!(beta > 0)) fail(ErrorKind::InvalidInput, "beta must be positive");
  const double b = beta, g = gamma;
  double w, wp;
  if (code == CodeKind::Pudenz313) {
    w = 3 * std::exp(-b * (4 * g + h)) + std::exp(-b * (6 * g + 3 * h)) +
        3 * std::exp(-b * (2 * g + h)) + std::exp(-3 * b * h);
    wp = 3 * std::exp(-b * (4 * g - h)) + std::exp(-b * (6 * g - 3 * h)) +
         3 * std::exp(-b * (2 * g - h)) + std::exp(3 * b * h);
  } else {
    double ties = 0.5 * (4 * std::exp(-4 * b * g) + 2 * std::exp(-8 * b * g));
    w = ties + 4 * std::exp(-b * (4 * g + h)) + std::exp(-2 * b * h);
    wp = ties + 4 * std::exp(-b * (4 * g - h)) + std::exp(2 * b * h);
  }
  return w / (w + wp);
}

ThermoOpt optimize_thermo_gamma(CodeKind code, double beta, double h, double gamma_max) {
  if (!(beta > 0) || !(h > 0)) fail(ErrorKind::InvalidInput, "beta and h must be positive");
  const int kGrid = 400;
  double best_g = 0, best_p = thermo_error_prob(code, beta, h, 0.0);
  for (int i = 1; i <= kGrid; ++i) {
    double g = gamma_max * double(i) / kGrid;
    double p = thermo_error_prob(code, beta, h, g);
    if (p < best_p) {
      best_p = p;
      best_g = g;
    }
  }
  // golden-section refinement around the grid minimum
  double lo = std::max(0.0, best_g - gamma_max / kGrid);
  double hi = std::min(gamma_max, best_g + gamma_max / kGrid);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  while (hi - lo > 1e-7) {
    double m1 = hi - phi * (hi - lo);
    double m2 = lo + phi * (hi - lo);
    if (thermo_error_prob(code, beta, h, m1) < thermo_error_prob(code, beta, h, m2))
      hi = m2;
    else
      lo = m1;
  }
  double g = 0.5 * (lo + hi);
  double p = thermo_error_prob(code, beta, h, g);
  if (p <= best_p) return {g, p};
  return {best_g, best_p};  // refinement never loses to the grid
}

namespace {

// The canonical two-encoded-qubit system: both groups of a single Chimera
// cell under the square code, antiferromagnetically coupled.
EncodedChain two_qubit_chain(double alpha, double gamma) {
  static const auto cell = build_chimera(1, 1, 4);
  auto [eg, map] = build_encoded_graph(CodeKind::Square414, cell);
  const int path[2] = {0, 1};
  EncodedChain chain;
  chain.code = map.code;
  chain.alpha = alpha;
  chain.gamma = gamma;
  chain.path = {0, 1};
  chain.logical = afm_chain_problem(path);
  chain.phys = encode_problem_unchecked(chain.logical, map.code, map, alpha, gamma);
  chain.group_data.resize(2);
  chain.group_penalty.assign(2, -1);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 4; ++k)
      chain.group_data[i][k] = chain.phys.problem.index_of(map.data[i][k]);
  return chain;
}

std::string level_label(int flips, int coupled) {
  std::string s = std::to_string(flips) + (flips == 1 ? " flip" : " flips");
  if (flips == 1) return s + (coupled ? " (chain qubit)" : " (free qubit)");
  if (flips == 2) {
    if (coupled == 2) return s + " (both chain)";
    if (coupled == 0) return s + " (both free)";
    return s + " (mixed)";
  }
  if (flips == 3) return s + " (" + std::to_string(coupled) + " chain)";
  return s + " (full group)";
}

}  // namespace

std::vector<SpectrumLevel> two_qubit_spectrum(double alpha, double gamma) {
  if (!(alpha >= 0) || !(gamma >= 0))
    fail(ErrorKind::InvalidInput, "alpha and gamma must be non-negative");
  auto chain = two_qubit_chain(alpha, gamma);
  const auto& prob = chain.phys.problem;
  const int n = prob.size();  // 8

  // Identify the chain-coupled slots of group 0 from the compiled couplings.
  std::set<int> coupled_idx;
  for (const auto& c : prob.couplings()) {
    bool a0 = false, b0 = false, a1 = false, b1 = false;
    for (int k = 0; k < 4; ++k) {
      a0 |= chain.group_data[0][k] == c.a;
      b0 |= chain.group_data[1][k] == c.b;
      a1 |= chain.group_data[1][k] == c.a;
      b1 |= chain.group_data[0][k] == c.b;
    }
    if (a0 && b0) coupled_idx.insert(c.a);
    if (a1 && b1) coupled_idx.insert(c.b);
  }

  // Reference ground state: group 0 up, group 1 down.
  std::vector<int8_t> ref(n);
  for (int k = 0; k < 4; ++k) {
    ref[chain.group_data[0][k]] = 1;
    ref[chain.group_data[1][k]] = -1;
  }
  const double e0 = ising_energy(prob, ref);

  // It must be a global minimum of the 256-state spectrum.
  for (int st = 0; st < 256; ++st) {
    std::vector<int8_t> s(n);
    for (int q = 0; q < n; ++q) s[q] = (st >> q) & 1 ? -1 : 1;
    if (ising_energy(prob, s) < e0 - 1e-12)
      fail(ErrorKind::InvalidInput, "internal: reference state is not a ground state");
  }

  GroupDecoder dec(chain);
  std::map<std::pair<int, int>, SpectrumLevel> classes;
  for (int pat = 1; pat < 16; ++pat) {
    std::vector<int8_t> s = ref;
    int coupled = 0;
    for (int k = 0; k < 4; ++k)
      if ((pat >> k) & 1) {
        int idx = chain.group_data[0][k];
        s[idx] = int8_t(-s[idx]);
        coupled += coupled_idx.count(idx);
      }
    double gap = ising_energy(prob, s) - e0;
    bool decodable = false;
    {
      auto out = dec.decode(s, DecodeScheme::EnergyMin);
      // decoded state is a logical ground state <=> alternating
      int a = chain.logical.index_of(chain.path[0]);
      int b = chain.logical.index_of(chain.path[1]);
      decodable = out.logical[b] == -out.logical[a];
    }
    auto key = std::make_pair(popcount4(pat), coupled);
    auto it = classes.find(key);
    if (it == classes.end()) {
      SpectrumLevel lv;
      lv.flips = key.first;
      lv.coupled_flips = key.second;
      lv.label = level_label(lv.flips, lv.coupled_flips);
      lv.multiplicity = 1;
      lv.gap = gap;
      lv.decodable = decodable;
      classes.emplace(key, lv);
    } else {
      if (std::abs(it->second.gap - gap) > 1e-9 || it->second.decodable != decodable)
        fail(ErrorKind::InvalidInput, "internal: inconsistent spectrum class");
      ++it->second.multiplicity;
    }
  }

  std::vector<SpectrumLevel> out;
  for (auto& [key, lv] : classes) out.push_back(lv);
  return out;
}

double decodability_crossing(double alpha) {
  if (!(alpha >= 0)) fail(ErrorKind::InvalidInput, "alpha must be non-negative");
  if (alpha == 0) return 0.0;

  // Levels are affine in gamma; recover (offset, slope) from two evaluations.
  auto at0 = two_qubit_spectrum(alpha, 0.0);
  auto at1 = two_qubit_spectrum(alpha, 1.0);
  struct Line {
    double a, b;  // gap = a + b * gamma
    bool decodable;
  };
  std::vector<Line> lines;
  for (size_t i = 0; i < at0.size(); ++i)
    lines.push_back({at0[i].gap, at1[i].gap - at0[i].gap, at0[i].decodable});

  auto min_gap = [&](bool decodable, double g) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& l : lines)
      if (l.decodable == decodable) m = std::min(m, l.a + l.b * g);
    return m;
  };
  if (min_gap(false, 0.0) <= min_gap(true, 0.0)) return 0.0;

  // Candidate crossings between every (undecodable, decodable) pair.
  double best = std::numeric_limits<double>::infinity();
  for (const auto& u : lines) {
    if (u.decodable) continue;
    for (const auto& d : lines) {
      if (!d.decodable) continue;
      double denom = d.b - u.b;
      if (denom <= 0) continue;  // undecodable never catches up on this pair
      double g = (u.a - d.a) / denom;
      if (g >= 0 && g < best && min_gap(false, g) <= min_gap(true, g) + 1e-15) best = g;
    }
  }
  if (!std::isfinite(best))
    fail(ErrorKind::InvalidInput, "no decodability crossing at this alpha");
  return best;
}

std::vector<HammingBin> classify_hamming_energy(const SampleSet& samples,
                                                const EncodedChain& chain, DecodeScheme scheme) {
  if (scheme == DecodeScheme::CoinToss)
    fail(ErrorKind::InvalidInput, "classification needs a deterministic decoder (MV or EM)");
  const auto& prob = chain.phys.problem;
  if (samples.qubit_ids != prob.ids())
    fail(ErrorKind::InvalidInput, "sample set does not match the compiled problem");

  // Faithful embeddings of the two degenerate logical ground states.
  const int n = prob.size();
  std::array<std::vector<int8_t>, 2> gs;
  for (int which = 0; which < 2; ++which) {
    gs[which].assign(n, 0);
    for (size_t g = 0; g < chain.path.size(); ++g) {
      int8_t s = ((g % 2 == 0) == (which == 0)) ? int8_t{1} : int8_t{-1};
      for (int k = 0; k < data_count(chain.code); ++k) gs[which][chain.group_data[g][k]] = s;
      if (chain.group_penalty[g] >= 0) gs[which][chain.group_penalty[g]] = s;
    }
  }
  const double e0 = ising_energy(prob, gs[0]);

  GroupDecoder dec(chain);
  std::map<std::pair<int, double>, HammingBin> bins;
  for (const auto& e : samples.entries) {
    int d0 = 0, d1 = 0;
    for (int q = 0; q < n; ++q) {
      d0 += e.spins[q] != gs[0][q];
      d1 += e.spins[q] != gs[1][q];
    }
    int hamming = std::min(d0, d1);
    double gap = e.energy - e0;
    auto out = dec.decode(e.spins, scheme);
    bool ok = true;
    for (size_t i = 1; i < chain.path.size(); ++i) {
      int a = chain.logical.index_of(chain.path[i - 1]);
      int b = chain.logical.index_of(chain.path[i]);
      ok &= out.logical[b] == -out.logical[a];
    }
    auto& bin = bins[{hamming, gap}];
    bin.hamming = hamming;
    bin.energy_gap = gap;
    bin.count += e.count;
    if (ok) bin.decodable += e.count;
  }

  std::vector<HammingBin> out;
  for (auto& [k, b] : bins) out.push_back(b);
  return out;
}

TieRate count_ties(const SampleSet& samples, const EncodedChain& chain) {
  if (chain.code == CodeKind::Pudenz313) return {0.0, true};
  GroupDecoder dec(chain);
  int64_t tied = 0;
  for (const auto& e : samples.entries) {
    auto vs = dec.votes(e.spins);
    int64_t t = std::count(vs.begin(), vs.end(), Vote::Tie);
    tied += t * e.count;
  }
  double denom = double(samples.reads) * double(chain.path.size());
  return {double(tied) / denom, false};
}

}  // namespace qac
