#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "qac/encoding.hpp"
#include "qac/errors.hpp"
#include "qac/ising.hpp"
#include "qac/topology.hpp"

using namespace qac;

namespace {

std::map<int, int> degree_histogram(const EncodedGraph& g) {
  std::map<int, int> hist;
  for (int v = 0; v < g.n; ++v)
    if (g.functional(v)) ++hist[g.degree(v)];
  return hist;
}

int coupling_count(const IsingProblem& p, double value) {
  int n = 0;
  for (const auto& c : p.couplings()) n += c.j == value;
  return n;
}

}  // namespace

TEST_CASE("square code on fault-free 8x8 is the two-level grid") {
  auto hw = build_chimera(8, 8, 4);
  auto [eg, map] = build_encoded_graph(CodeKind::Square414, hw);
  CHECK(eg.n == 128);
  CHECK(eg.functional_vertices().size() == 128);
  auto hist = degree_histogram(eg);
  CHECK(hist[3] == 8);
  CHECK(hist[4] == 48);
  CHECK(hist[5] == 72);
  CHECK(hist.rbegin()->first == 5);
}

TEST_CASE("pudenz code on fault-free 8x8 has degree 3") {
  auto hw = build_chimera(8, 8, 4);
  auto [eg, map] = build_encoded_graph(CodeKind::Pudenz313, hw);
  CHECK(eg.n == 128);
  CHECK(eg.functional_vertices().size() == 128);
  auto hist = degree_histogram(eg);
  CHECK(hist[2] == 32);
  CHECK(hist[3] == 96);
  CHECK(hist.rbegin()->first == 3);
}

TEST_CASE("single cell encodes two vertices joined by one edge") {
  auto hw = build_chimera(1, 1, 4);
  for (CodeKind code : {CodeKind::Square414, CodeKind::Pudenz313}) {
    auto [eg, map] = build_encoded_graph(code, hw);
    CHECK(eg.n == 2);
    CHECK(eg.edges.size() == 1);
    CHECK(eg.degree(0) == 1);
    CHECK(eg.degree(1) == 1);
  }
}

TEST_CASE("encoding maps satisfy their structural invariants") {
  auto hw = build_chimera(4, 4, 4, {7});
  for (CodeKind code : {CodeKind::Square414, CodeKind::Pudenz313}) {
    auto [eg, map] = build_encoded_graph(code, hw);
    std::set<std::pair<int, int>> roles;
    auto norm = [](std::pair<int, int> e) {
      if (e.first > e.second) std::swap(e.first, e.second);
      return e;
    };
    for (int v = 0; v < map.n; ++v) {
      if (!map.functional[v]) continue;
      CHECK(int(map.penalty_couplers[v].size()) == penalty_couplers_per_vertex(code));
      for (auto pc : map.penalty_couplers[v]) {
        CHECK(hw.has_coupler(pc.first, pc.second));
        CHECK(roles.insert(norm(pc)).second);  // no coupler reuse
      }
      if (code == CodeKind::Pudenz313) CHECK(map.penalty[v] >= 0);
    }
    for (const auto& [edge, couplers] : map.edge_couplers) {
      CHECK(int(couplers.size()) == boost_factor(code));
      for (auto pc : couplers) {
        CHECK(hw.has_coupler(pc.first, pc.second));
        CHECK(roles.insert(norm(pc)).second);
      }
    }
  }
}

TEST_CASE("vertex status tracks the fault mask") {
  auto hw_clean = build_chimera(2, 2, 4);
  {
    // knock out a pudenz penalty qubit: group 0 of cell (0,0) uses half-1 index 3
    auto hw = build_chimera(2, 2, 4, {hw_clean.qubit_id(0, 0, 1, 3)});
    auto [eg, map] = build_encoded_graph(CodeKind::Pudenz313, hw);
    CHECK(eg.status[0] == VertexStatus::MissingPenalty);
    CHECK(eg.status[1] == VertexStatus::FullyFunctional);
    // a data fault inactivates instead
    auto hw_d = build_chimera(2, 2, 4, {hw_clean.qubit_id(0, 0, 1, 1)});
    auto [eg_d, map_d] = build_encoded_graph(CodeKind::Pudenz313, hw_d);
    CHECK(eg_d.status[1] == VertexStatus::Inactive);
    CHECK(eg_d.status[0] == VertexStatus::FullyFunctional);
  }
  {
    // any data fault inactivates a square-code vertex
    auto hw = build_chimera(2, 2, 4, {hw_clean.qubit_id(0, 0, 0, 0)});
    auto [eg, map] = build_encoded_graph(CodeKind::Square414, hw);
    CHECK(eg.status[0] == VertexStatus::Inactive);
    CHECK(eg.status[1] == VertexStatus::FullyFunctional);
  }
  CHECK_THROWS_AS(build_encoded_graph(CodeKind::Square414, build_chimera(2, 2, 3)), Error);
}

TEST_CASE("compiling a two-vertex chain") {
  auto hw = build_chimera(1, 1, 4);

  SUBCASE("square414: 2 problem couplers, 8 penalty couplers") {
    auto [eg, map] = build_encoded_graph(CodeKind::Square414, hw);
    IsingProblem chain;
    chain.add_coupling(0, 1, 1.0);
    auto phys = encode_problem(chain, CodeKind::Square414, map, 0.5, 0.3);
    CHECK(phys.qubit_ids.size() == 8);
    CHECK(phys.problem.couplings().size() == 10);
    CHECK(coupling_count(phys.problem, 0.5) == 2);
    CHECK(coupling_count(phys.problem, -0.3) == 8);
  }
  SUBCASE("pudenz313: 3 problem couplers, 6 penalty couplers") {
    auto [eg, map] = build_encoded_graph(CodeKind::Pudenz313, hw);
    IsingProblem chain;
    chain.add_coupling(0, 1, 1.0);
    auto phys = encode_problem(chain, CodeKind::Pudenz313, map, 0.5, 0.3);
    CHECK(phys.qubit_ids.size() == 8);
    CHECK(coupling_count(phys.problem, 0.5) == 3);
    CHECK(coupling_count(phys.problem, -0.3) == 6);
  }
  SUBCASE("zero scaling gives the all-zero problem") {
    auto [eg, map] = build_encoded_graph(CodeKind::Square414, hw);
    IsingProblem chain;
    chain.set_field(0, -0.7);
    chain.add_coupling(0, 1, 1.0);
    auto phys = encode_problem(chain, CodeKind::Square414, map, 0.0, 0.0);
    for (double h : phys.problem.fields()) CHECK(h == 0.0);
    for (const auto& c : phys.problem.couplings()) CHECK(c.j == 0.0);
  }
}

TEST_CASE("encode rejects bad inputs") {
  auto hw = build_chimera(1, 1, 4, {0});  // kills both square groups via data loss
  auto [eg, map] = build_encoded_graph(CodeKind::Square414, hw);
  IsingProblem chain;
  chain.add_coupling(0, 1, 1.0);
  CHECK_THROWS_AS(encode_problem(chain, CodeKind::Square414, map, 0.5, 0.3), Error);

  auto hw2 = build_chimera(1, 1, 4);
  auto [eg2, map2] = build_encoded_graph(CodeKind::Square414, hw2);
  CHECK_THROWS_AS(encode_problem(chain, CodeKind::Square414, map2, 1.5, 0.3), Error);
  CHECK_THROWS_AS(encode_problem(chain, CodeKind::Square414, map2, 0.5, -0.1), Error);

  IsingProblem offgrid;
  offgrid.add_coupling(0, 3, 1.0);  // vertices 0 and 3 are not adjacent on 1x2 cells
  auto hw3 = build_chimera(1, 2, 4);
  auto [eg3, map3] = build_encoded_graph(CodeKind::Square414, hw3);
  CHECK_THROWS_AS(encode_problem(offgrid, CodeKind::Square414, map3, 0.5, 0.3), Error);
}

TEST_CASE("energy boost: faithful problem energy is boost times logical energy") {
  auto hw = build_chimera(3, 4, 4);
  for (CodeKind code : {CodeKind::Square414, CodeKind::Pudenz313}) {
    auto [eg, map] = build_encoded_graph(code, hw);
    auto view_path = [&] {
      // a 10-vertex path: walk the encoded graph greedily
      std::vector<int> path{0};
      std::set<int> used{0};
      while (int(path.size()) < 10) {
        bool extended = false;
        for (int w : eg.neighbors_of(path.back()))
          if (!used.count(w)) {
            path.push_back(w);
            used.insert(w);
            extended = true;
            break;
          }
        REQUIRE(extended);
      }
      return path;
    }();

    // chain couplings plus dyadic fields keep every sum exact
    IsingProblem logical;
    for (size_t i = 0; i + 1 < view_path.size(); ++i)
      logical.add_coupling(view_path[i], view_path[i + 1], 1.0);
    for (size_t i = 0; i < view_path.size(); ++i)
      logical.set_field(view_path[i], (double(i % 5) - 2.0) / 8.0);

    auto phys = encode_problem(logical, code, map, 1.0, 0.0);  // gamma 0: problem term only
    const int n = logical.size();
    std::vector<int8_t> s(n);
    for (uint32_t state = 0; state < (uint32_t{1} << n); ++state) {
      for (int i = 0; i < n; ++i) s[i] = (state >> i) & 1 ? -1 : 1;
      double logical_e = ising_energy(logical, s);
      auto phys_s = faithful_embedding(logical, s, map, phys.qubit_ids);
      double phys_e = ising_energy(phys.problem, phys_s);
      CHECK(phys_e == double(boost_factor(code)) * logical_e);
    }
  }
}

TEST_CASE("faithful embedding energy closed form") {
  auto hw = build_chimera(1, 1, 4);
  IsingProblem chain;
  chain.add_coupling(0, 1, 1.0);
  std::vector<int8_t> s{1, -1};

  for (auto [code, expect_problem, expect_pen] :
       {std::tuple{CodeKind::Square414, -2.0, 8.0}, {CodeKind::Pudenz313, -3.0, 6.0}}) {
    auto [eg, map] = build_encoded_graph(code, hw);
    for (auto [alpha, gamma] : {std::pair{0.5, 0.3}, {1.0, 0.0}, {0.25, 1.0}}) {
      double closed = faithful_embedding_energy(chain, s, code, alpha, gamma);
      CHECK(closed == doctest::Approx(alpha * expect_problem - gamma * expect_pen).epsilon(1e-15));
      // against exhaustive evaluation of the compiled 8-qubit problem
      auto phys = encode_problem(chain, code, map, alpha, gamma);
      auto phys_s = faithful_embedding(chain, s, map, phys.qubit_ids);
      CHECK(closed == doctest::Approx(ising_energy(phys.problem, phys_s)).epsilon(1e-15));
    }
  }

  SUBCASE("alpha=0 leaves the configuration-independent penalty floor") {
    auto [eg, map] = build_encoded_graph(CodeKind::Square414, hw);
    auto phys = encode_problem(chain, CodeKind::Square414, map, 0.0, 0.7);
    for (auto sv : {std::vector<int8_t>{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}) {
      auto phys_s = faithful_embedding(chain, sv, map, phys.qubit_ids);
      CHECK(ising_energy(phys.problem, phys_s) == doctest::Approx(-0.7 * 8).epsilon(1e-15));
      CHECK(faithful_embedding_energy(chain, sv, CodeKind::Square414, 0.0, 0.7) ==
            doctest::Approx(-0.7 * 8).epsilon(1e-15));
    }
  }
}

TEST_CASE("penalty term of a faithful embedding is minimal") {
  // against brute force over all 8-qubit states: no state has lower penalty
  auto hw = build_chimera(1, 1, 4);
  for (CodeKind code : {CodeKind::Square414, CodeKind::Pudenz313}) {
    auto [eg, map] = build_encoded_graph(code, hw);
    IsingProblem chain;
    chain.add_coupling(0, 1, 1.0);
    auto phys = encode_problem(chain, code, map, 0.0, 1.0);  // penalty only
    double floor = -double(2 * penalty_couplers_per_vertex(code));
    std::vector<int8_t> s(8);
    for (int state = 0; state < 256; ++state) {
      for (int q = 0; q < 8; ++q) s[q] = (state >> q) & 1 ? -1 : 1;
      CHECK(ising_energy(phys.problem, s) >= floor - 1e-12);
    }
  }
}

TEST_CASE("encoding map json export") {
  auto hw = build_chimera(1, 2, 4);
  auto [eg, map] = build_encoded_graph(CodeKind::Pudenz313, hw);
  auto j = map_to_json(map);
  CHECK(j["code"] == "pudenz313");
  CHECK(j["vertices"].size() == 4);
  CHECK(j["edges"].size() == eg.edges.size());
  for (const auto& jv : j["vertices"]) {
    CHECK(jv["data"].size() == 3);
    CHECK(jv.contains("penalty"));
  }
}
