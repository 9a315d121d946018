#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "qac/encoding.hpp"
#include "qac/errors.hpp"
#include "qac/sampling.hpp"
#include "qac/topology.hpp"

using namespace qac;

namespace {

EncodedChain two_group_chain(double alpha, double gamma) {
  static const auto hw = build_chimera(1, 1, 4);
  auto [eg, map] = build_encoded_graph(CodeKind::Square414, hw);
  const int path[2] = {0, 1};
  return compile_chain(map, path, alpha, gamma);
}

}  // namespace

TEST_CASE("ising energy basics") {
  IsingProblem p;
  p.add_coupling(0, 1, 1.0);
  CHECK(ising_energy(p, std::vector<int8_t>{1, -1}) == -1.0);
  CHECK(ising_energy(p, std::vector<int8_t>{1, 1}) == 1.0);
  CHECK_THROWS_AS(ising_energy(p, std::vector<int8_t>{1}), Error);

  // AFM chain ground energy -(N-1)
  const int n = 9;
  IsingProblem chain;
  for (int i = 0; i + 1 < n; ++i) chain.add_coupling(i, i + 1, 1.0);
  std::vector<int8_t> alt(n);
  for (int i = 0; i < n; ++i) alt[i] = i % 2 ? -1 : 1;
  CHECK(ising_energy(chain, alt) == -(n - 1));
}

TEST_CASE("problem json round trip and flat-list format") {
  IsingProblem p;
  p.set_field(3, -0.5);
  p.add_coupling(3, 7, 1.25);
  auto j = problem_to_json(p);
  auto p2 = problem_from_json(j);
  CHECK(p2.ids() == p.ids());
  CHECK(p2.field_of(3) == -0.5);
  CHECK(p2.couplings().size() == 1);

  CHECK_THROWS_AS(problem_from_json(nlohmann::json::parse("[[1,2,3,4]]")), Error);
  CHECK_THROWS_AS(problem_from_json(nlohmann::json::parse("{}")), Error);
}

TEST_CASE("duplicate couplings and non-finite values rejected") {
  IsingProblem p;
  p.add_coupling(0, 1, 1.0);
  CHECK_THROWS_AS(p.add_coupling(1, 0, 2.0), Error);
  CHECK_THROWS_AS(p.add_coupling(2, 2, 1.0), Error);
  CHECK_THROWS_AS(p.set_field(0, std::nan("")), Error);
}

TEST_CASE("metropolis bookkeeping: counts, determinism, reproducibility") {
  IsingProblem p;
  p.add_coupling(0, 1, 1.0);
  p.add_coupling(1, 2, 1.0);
  p.set_field(0, 0.25);
  AnnealSchedule sched{0.1, 3.0, 50};

  auto s1 = metropolis_anneal(p, sched, 501, 2024);
  CHECK(s1.total_count() == 501);
  CHECK(s1.reads == 501);

  auto s2 = metropolis_anneal(p, sched, 501, 2024);
  CHECK(s1.entries.size() == s2.entries.size());
  for (size_t i = 0; i < s1.entries.size(); ++i) {
    CHECK(s1.entries[i].spins == s2.entries[i].spins);
    CHECK(s1.entries[i].count == s2.entries[i].count);
    CHECK(s1.entries[i].energy == s2.entries[i].energy);
  }

  SUBCASE("thread count does not change the result") {
    auto s4 = metropolis_anneal(p, sched, 501, 2024, 4);
    CHECK(s1.entries.size() == s4.entries.size());
    for (size_t i = 0; i < s1.entries.size(); ++i) {
      CHECK(s1.entries[i].spins == s4.entries[i].spins);
      CHECK(s1.entries[i].count == s4.entries[i].count);
    }
  }

  SUBCASE("stored energies equal re-evaluation exactly") {
    for (const auto& e : s1.entries) CHECK(e.energy == ising_energy(p, e.spins));
  }

  SUBCASE("different seeds differ") {
    auto s3 = metropolis_anneal(p, sched, 501, 2025);
    bool same = s1.entries.size() == s3.entries.size();
    if (same)
      for (size_t i = 0; i < s1.entries.size(); ++i)
        same = same && s1.entries[i].count == s3.entries[i].count &&
               s1.entries[i].spins == s3.entries[i].spins;
    CHECK(!same);
  }
}

TEST_CASE("single-qubit metropolis freezes into the field ground state") {
  IsingProblem p;
  p.set_field(0, -1.0);
  auto s = metropolis_anneal(p, {0.1, 8.0, 100}, 1000, 7);
  int64_t up = 0;
  for (const auto& e : s.entries)
    if (e.spins[0] == 1) up += e.count;
  CHECK(double(up) / 1000.0 >= 0.99);
}

TEST_CASE("exact gibbs: two-state marginal, normalization, uniform limit") {
  IsingProblem p;
  p.set_field(0, -1.0);
  auto g = exact_gibbs(p, 1.0);
  // P(+1) = e^beta / (e^beta + e^-beta)
  double expect = std::exp(1.0) / (std::exp(1.0) + std::exp(-1.0));
  CHECK(g.prob[0] == doctest::Approx(expect).epsilon(1e-12));
  CHECK(g.prob[0] == doctest::Approx(0.8808).epsilon(1e-4));

  IsingProblem q;
  q.add_coupling(0, 1, 0.7);
  q.add_coupling(1, 2, -0.3);
  q.set_field(2, 0.2);
  auto g2 = exact_gibbs(q, 1.3);
  double sum = 0;
  for (double w : g2.prob) sum += w;
  CHECK(std::abs(sum - 1.0) < 1e-12);

  auto g0 = exact_gibbs(q, 0.0);
  for (double w : g0.prob) CHECK(w == doctest::Approx(1.0 / 8).epsilon(1e-12));

  IsingProblem big;
  for (int i = 0; i < 26; ++i) big.set_field(i, 0.1);
  CHECK_THROWS_AS(exact_gibbs(big, 1.0), Error);
}

TEST_CASE("chain transfer matrix agrees with exhaustive enumeration") {
  for (auto [alpha, gamma, beta] :
       {std::tuple{0.3, 0.3, 1.0}, {0.5, 0.2, 2.0}, {1.0, 1.0, 0.7}, {0.2, 0.0, 1.5}}) {
    auto chain = two_group_chain(alpha, gamma);
    auto dp = chain_gibbs_dp(chain, beta);
    auto g = exact_gibbs(chain.phys.problem, beta);

    double gs_prob = 0;
    for (uint32_t s : g.ground_states) gs_prob += g.prob[s];
    CHECK(dp.ground_prob == doctest::Approx(gs_prob).epsilon(1e-10));
    CHECK(dp.ground_energy == doctest::Approx(g.ground_energy).epsilon(1e-12));

    // per-group marginals against direct summation
    std::array<double, 16> m0{};
    for (size_t st = 0; st < g.prob.size(); ++st) {
      auto spins = g.spins_of(uint32_t(st));
      int code = 0;
      for (int k = 0; k < 4; ++k)
        if (spins[chain.group_data[0][k]] < 0) code |= 1 << k;
      m0[code] += g.prob[st];
    }
    for (int st = 0; st < 16; ++st)
      CHECK(dp.group_marginals[0][st] == doctest::Approx(m0[st]).epsilon(1e-10));
  }
}

TEST_CASE("chain transfer matrix scales to long chains") {
  auto hw = build_chimera(8, 8, 4);
  auto [eg, map] = build_encoded_graph(CodeKind::Square414, hw);
  // snake down the first column: intra-cell edge, then a vertical edge
  std::vector<int> path;
  for (int r = 0; r < 8; ++r) {
    int v0 = (r * 8 + 0) * 2, v1 = v0 + 1;
    if (r % 2 == 0) {
      path.push_back(v0);
      path.push_back(v1);
    } else {
      path.push_back(v1);
      path.push_back(v0);
    }
  }
  auto chain = compile_chain(map, path, 0.5, 0.4);
  auto dp = chain_gibbs_dp(chain, 2.0);
  CHECK(dp.ground_degeneracy == 2);
  CHECK(dp.ground_prob > 0);
  CHECK(dp.ground_prob < 1);

  std::vector<int8_t> gs(chain.logical.size());
  for (size_t i = 0; i < path.size(); ++i)
    gs[chain.logical.index_of(path[i])] = i % 2 ? -1 : 1;
  CHECK(dp.ground_energy ==
        doctest::Approx(faithful_embedding_energy(chain.logical, gs, chain.code, 0.5, 0.4))
            .epsilon(1e-12));
}

TEST_CASE("zero-temperature limit concentrates on the degenerate ground states") {
  auto chain = two_group_chain(0.4, 0.5);
  auto dp = chain_gibbs_dp(chain, 40.0);
  CHECK(dp.ground_degeneracy == 2);
  CHECK(dp.ground_prob == doctest::Approx(1.0).epsilon(1e-8));

  auto flat = chain_gibbs_dp(two_group_chain(0.0, 0.0), 1.0);
  for (int st = 0; st < 16; ++st)
    CHECK(flat.group_marginals[0][st] == doctest::Approx(1.0 / 16).epsilon(1e-12));
}

TEST_CASE("map-level chain dp rejects non-path problems") {
  auto hw = build_chimera(2, 2, 4);
  auto [eg, map] = build_encoded_graph(CodeKind::Square414, hw);
  // vertices 0,1 in cell (0,0): 0-1 intra edge; 2,3 in cell (0,1): branch via 0-2, 1-3
  IsingProblem cyc;
  cyc.add_coupling(0, 1, 1.0);
  cyc.add_coupling(0, 2, 1.0);
  cyc.add_coupling(1, 3, 1.0);
  cyc.add_coupling(2, 3, 1.0);  // a 4-cycle
  auto phys = encode_problem(cyc, CodeKind::Square414, map, 0.5, 0.3);
  CHECK_THROWS_AS(chain_gibbs_dp(phys, map, cyc, 1.0), Error);

  IsingProblem path;
  path.add_coupling(0, 1, 1.0);
  path.add_coupling(1, 3, 1.0);
  auto phys2 = encode_problem(path, CodeKind::Square414, map, 0.5, 0.3);
  auto dp = chain_gibbs_dp(phys2, map, path, 1.2);
  auto g = exact_gibbs(phys2.problem, 1.2);
  double gs_prob = 0;
  for (uint32_t s : g.ground_states) gs_prob += g.prob[s];
  CHECK(dp.ground_prob == doctest::Approx(gs_prob).epsilon(1e-10));
}

TEST_CASE("sample sets round-trip through json lines") {
  IsingProblem p;
  p.add_coupling(0, 1, 1.0);
  p.set_field(0, -0.25);
  auto s = metropolis_anneal(p, {0.1, 2.0, 30}, 200, 11);
  std::stringstream buf;
  write_jsonl(s, buf);
  auto s2 = read_jsonl(buf);
  CHECK(s2.qubit_ids == s.qubit_ids);
  CHECK(s2.reads == s.reads);
  CHECK(s2.entries.size() == s.entries.size());
  for (size_t i = 0; i < s.entries.size(); ++i) {
    CHECK(s2.entries[i].spins == s.entries[i].spins);
    CHECK(s2.entries[i].count == s.entries[i].count);
    CHECK(s2.entries[i].energy == s.entries[i].energy);
  }
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(AnnealSchedule{2.0, 1.0, 10}.validate(), Error);
  CHECK_THROWS_AS(AnnealSchedule{0.1, 1.0, 0}.validate(), Error);
  IsingProblem p;
  p.set_field(0, 1.0);
  CHECK_THROWS_AS(metropolis_anneal(p, {0.1, 1.0, 10}, 0, 1), Error);
}
