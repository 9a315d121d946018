#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qac/errors.hpp"
#include "qac/topology.hpp"

using namespace qac;

namespace {

// Construction-independent coupler oracle: enumerate couplers from the
// (row, col, half, index) description with explicit set arithmetic, no id
// formulas shared with the implementation beyond qubit_id itself.
std::set<std::pair<int, int>> oracle_couplers(const HardwareGraph& g) {
  std::set<std::pair<int, int>> out;
  auto put = [&](int a, int b) {
    if (!g.active[a] || !g.active[b]) return;
    out.insert({std::min(a, b), std::max(a, b)});
  };
  for (int r = 0; r < g.rows; ++r)
    for (int c = 0; c < g.cols; ++c) {
      for (int i = 0; i < g.cell_size; ++i)
        for (int j = 0; j < g.cell_size; ++j) put(g.qubit_id(r, c, 0, i), g.qubit_id(r, c, 1, j));
      for (int i = 0; i < g.cell_size; ++i) {
        if (r > 0) put(g.qubit_id(r, c, 0, i), g.qubit_id(r - 1, c, 0, i));
        if (c > 0) put(g.qubit_id(r, c, 1, i), g.qubit_id(r, c - 1, 1, i));
      }
    }
  return out;
}

}  // namespace

TEST_CASE("fault-free 8x8 chimera has 512 qubits and 1472 couplers") {
  auto g = build_chimera(8, 8, 4);
  CHECK(g.active_qubits() == 512);
  CHECK(g.couplers.size() == 1472);

  int intra = 0, inter = 0;
  for (auto [a, b] : g.couplers) {
    bool same_cell = g.cell_row_of(a) == g.cell_row_of(b) && g.cell_col_of(a) == g.cell_col_of(b);
    if (same_cell) {
      CHECK(g.half_of(a) != g.half_of(b));
      ++intra;
    } else {
      CHECK(g.half_of(a) == g.half_of(b));
      CHECK(g.index_of(a) == g.index_of(b));
      ++inter;
    }
  }
  CHECK(intra == 64 * 16);
  CHECK(inter == 4 * (2 * 8 * 7));
}

TEST_CASE("coupler count formula holds for assorted grids") {
  for (auto [r, c] : {std::pair{1, 1}, {2, 3}, {8, 8}, {4, 1}}) {
    auto g = build_chimera(r, c, 4);
    size_t expected = size_t(16 * r * c) + size_t(4 * (r * (c - 1) + c * (r - 1)));
    CHECK(g.couplers.size() == expected);
    auto oracle = oracle_couplers(g);
    CHECK(std::set<std::pair<int, int>>(g.couplers.begin(), g.couplers.end()) == oracle);
  }
}

TEST_CASE("single cell is a K44") {
  auto g = build_chimera(1, 1, 4);
  CHECK(g.active_qubits() == 8);
  CHECK(g.couplers.size() == 16);
  for (auto [a, b] : g.couplers) CHECK(g.half_of(a) != g.half_of(b));
}

TEST_CASE("faults deactivate qubits and incident couplers") {
  auto g = build_chimera(8, 8, 4, {0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(g.active_qubits() == 504);
  for (auto [a, b] : g.couplers) {
    CHECK(g.active[a]);
    CHECK(g.active[b]);
  }
  CHECK(std::set<std::pair<int, int>>(g.couplers.begin(), g.couplers.end()) == oracle_couplers(g));
}

TEST_CASE("fault id out of range is rejected") {
  CHECK_THROWS_AS(build_chimera(2, 2, 4, {64}), Error);
  CHECK_THROWS_AS(build_chimera(2, 2, 4, {-1}), Error);
  CHECK_THROWS_AS(build_chimera(0, 1, 4), Error);
}

TEST_CASE("active_neighbors matches direct enumeration") {
  auto g = build_chimera(8, 8, 4);
  // interior cell, half-0 qubit: 4 intra + 2 inter
  int q = g.qubit_id(3, 3, 0, 2);
  CHECK(g.active_neighbors(q).size() == 6);
  // corner cell, half-0 qubit: only one vertical neighbor exists
  int corner = g.qubit_id(0, 0, 0, 1);
  CHECK(g.active_neighbors(corner).size() == 5);

  SUBCASE("fault removes the inter-cell partner") {
    auto gf = build_chimera(8, 8, 4, {g.qubit_id(2, 3, 0, 2), g.qubit_id(4, 3, 0, 2)});
    CHECK(gf.active_neighbors(q).size() == 4);
  }
}

TEST_CASE("neighbor relation is symmetric") {
  auto g = build_chimera(3, 4, 4, {5, 17});
  for (int q = 0; q < g.total_qubits(); ++q) {
    if (!g.active[q]) continue;
    for (int w : g.active_neighbors(q)) {
      auto back = g.active_neighbors(w);
      CHECK(std::count(back.begin(), back.end(), q) == 1);
    }
  }
}

TEST_CASE("neighbor queries reject inactive and out-of-range qubits") {
  auto g = build_chimera(2, 2, 4, {3});
  CHECK_THROWS_AS(g.active_neighbors(3), Error);
  CHECK_THROWS_AS(g.active_neighbors(-1), Error);
  CHECK_THROWS_AS(g.active_neighbors(64), Error);
}

TEST_CASE("graph json round trip") {
  auto g = build_chimera(4, 3, 4, {7, 2});
  auto j = graph_to_json(g);
  auto g2 = graph_from_json(j);
  CHECK(g2.rows == 4);
  CHECK(g2.cols == 3);
  CHECK(g2.couplers == g.couplers);
  CHECK(g2.faults == std::vector<int>{2, 7});

  CHECK_THROWS_AS(graph_from_json(nlohmann::json{{"rows", 2}}), Error);
}
